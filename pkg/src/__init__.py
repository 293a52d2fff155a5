"""copeset: CoPE sets for excursion sets of gridded fields."""

__version__ = "0.1.0"

"""The simulation signal μ: a sum of three isotropic Gaussian bumps on the 10 x 10 square."""

import numpy as np

from src.core.grid import GridGeometry, ScalarField

SIGNAL_CENTERS = ((3.0, 3.0), (7.0, 3.5), (4.5, 7.0))
SIGNAL_WEIGHTS = (2.0, 1.6, 1.8)
SIGNAL_RADII = (1.2, 1.0, 1.4)

DEFAULT_LEVEL = 4.0 / 3.0


def default_geometry(pixels: int = 64, extent: float = 10.0) -> GridGeometry:
    return GridGeometry.square(pixels, extent)


def signal_mu(geometry: GridGeometry | None = None) -> ScalarField:
    """μ(s) = Σ_k w_k exp(-‖s - c_k‖² / (2 r_k²)) evaluated at the cell centers."""
    geometry = geometry or default_geometry()
    xx, yy = np.meshgrid(geometry.x_coords(), geometry.y_coords())
    mu = np.zeros(geometry.shape)
    for (cx, cy), w, r in zip(SIGNAL_CENTERS, SIGNAL_WEIGHTS, SIGNAL_RADII):
        mu += w * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2.0 * r**2))
    return ScalarField(geometry, mu)


def signal_provenance() -> dict[str, str]:
    return {
        "signal_centers": repr(SIGNAL_CENTERS),
        "signal_weights": repr(SIGNAL_WEIGHTS),
        "signal_radii": repr(SIGNAL_RADII),
    }

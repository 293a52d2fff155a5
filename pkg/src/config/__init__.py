"""Configuration package."""

from .settings import settings, CopeSettings

__all__ = ["settings", "CopeSettings"]

"""Graph package: state and workflow definitions."""

from .state import AnalysisState

__all__ = ["AnalysisState"]

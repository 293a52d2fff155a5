"""Node functions of the analyze graph."""

from .ingest import ingest_node
from .estimate import boundary_node, domain_fallback_node, fit_node
from .bootstrap import bootstrap_node, cope_node
from .report import render_node, summarize_node

__all__ = [
    "ingest_node", "fit_node", "boundary_node", "domain_fallback_node",
    "bootstrap_node", "cope_node", "render_node", "summarize_node",
]

"""Hypergraph-product CSS codes from expander graphs, with exact desk-scale checks.

The package builds product codes from graphs, audits their structure
exhaustively, computes exact measurement statistics of code states and
errored impostors, and tests vertex-expansion depth bounds on small circuits.
"""

from __future__ import annotations

from hgpnlets.css import CssCode, logical_basis
from hgpnlets.gf2 import BitMatrix, BitVector, nullspace_basis, rank
from hgpnlets.graphs import Graph, complete_graph, cycle_graph, random_regular
from hgpnlets.hgp import HgpCode, hypergraph_product
from hgpnlets.pipeline import ExperimentConfig, run_nlets, run_structural_audit, run_warmup

__version__ = "0.1.0"

__all__ = [
    "BitMatrix",
    "BitVector",
    "CssCode",
    "ExperimentConfig",
    "Graph",
    "HgpCode",
    "complete_graph",
    "cycle_graph",
    "hypergraph_product",
    "logical_basis",
    "nullspace_basis",
    "random_regular",
    "rank",
    "run_nlets",
    "run_structural_audit",
    "run_warmup",
]

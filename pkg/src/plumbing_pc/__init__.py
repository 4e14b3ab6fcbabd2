"""Exact invariants of negative definite plumbing trees.

Modules: graph_core (graphs and intersection data), lattice (L, L', H and
representatives), series (the equivariant series, reductions, counting
functions), polypart (polynomial parts, quasipolynomial fits, periodic
constants), surgery (end-vertex identities) and cli.
"""
from .graph_core import PlumbingGraph, load_graph, make_graph, parse_graph
from .lattice import LatticeVector
from .polypart import periodic_constant, polypart_multi, sw_invariant

__all__ = [
    "LatticeVector",
    "PlumbingGraph",
    "load_graph",
    "make_graph",
    "parse_graph",
    "periodic_constant",
    "polypart_multi",
    "sw_invariant",
]
__version__ = "0.1.0"

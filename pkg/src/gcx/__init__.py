"""Exact computations with oriented graph complexes and the derivation
complexes of the properads of (involutive) Lie bialgebras.

Modules:

    graphcore   directed multigraphs, canonical forms with orientation signs,
                isomorph-free generation
    exactla     sparse exact rational matrices: rank, solve, kernel
    gclib       graph sums, the Lie bracket, the differentials of dfGC/dGC/GCor,
                hbar-series and distinguished elements
    homology    finite (genus, degree) slices, their matrices and Betti numbers,
                with an on-disk cache
    propcalc    leg graphs, the Holieb differentials, Der complexes and the maps
                F, F_diamond, Psi, G, G_hbar
    verify      named checks shared by the command line tool
    cli         the ``gcx`` command
"""

from .graphcore import CanonicalGraph, ConstraintSet, DiGraph, GraphInputError, Parity, canonicalize, parse_graph
from .exactla import SparseRationalMatrix, kernel_basis, rank, solve
from .gclib import (
    ComplexId,
    DomainError,
    GraphSum,
    HbarSeries,
    bracket,
    degree,
    differential,
    genus,
    hbar_bracket,
    hbar_differential,
    make_special,
    mc_residual,
)
from .homology import SliceKey, betti, lift, slice_basis, slice_matrix
from .propcalc import LegGraph, LegGraphSum, der_delta, delta_diamond, delta_holieb, map_F, map_F_diamond, skeleton

__version__ = "0.1.0"

__all__ = [
    "CanonicalGraph",
    "ComplexId",
    "ConstraintSet",
    "DiGraph",
    "DomainError",
    "GraphInputError",
    "GraphSum",
    "HbarSeries",
    "LegGraph",
    "LegGraphSum",
    "Parity",
    "SliceKey",
    "SparseRationalMatrix",
    "betti",
    "bracket",
    "canonicalize",
    "degree",
    "delta_diamond",
    "delta_holieb",
    "der_delta",
    "differential",
    "genus",
    "hbar_bracket",
    "hbar_differential",
    "kernel_basis",
    "lift",
    "make_special",
    "map_F",
    "map_F_diamond",
    "mc_residual",
    "parse_graph",
    "rank",
    "skeleton",
    "slice_basis",
    "slice_matrix",
    "solve",
]

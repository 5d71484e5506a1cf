"""Finite slices of the graph complexes, their matrices and cohomology.

A slice is fixed by (complex, genus g, degree k); the degree formula then
forces V = k + d + (d-1)(g-1) vertices and E = V + g - 1 edges, so it is
spanned by finitely many graphs.  The differential maps slice (g, k) to
slice (g, k+1).

Bases and matrices can be kept in an on-disk cache laid out as

    <root>/<family>-d<d>/g<g>/k<k>.basis   one graph literal per line
    <root>/<family>-d<d>/g<g>/k<k>.smat    the matrix into slice k+1

with ``conventions.txt`` at the root recording the sign convention version.
"""

from __future__ import annotations

import logging
import os
import shutil
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .exactla import SparseRationalMatrix, rank, solve
from .gclib import ComplexId, DomainError, GraphSum, degree, differential, genus
from .graphcore import canonicalize, enumerate_digraphs, parse_graph

log = logging.getLogger(__name__)

CONVENTIONS_VERSION = "gcx-signs-1: odd d orders vertices, even d orders edges; insertion appends; parallel bundles edge-labelled"


@dataclass(frozen=True)
class SliceKey:
    complex: ComplexId
    genus: int
    degree: int

    @property
    def vertices(self) -> int:
        d = self.complex.dimension
        return self.degree + d + (d - 1) * (self.genus - 1)

    @property
    def edges(self) -> int:
        return self.vertices + self.genus - 1

    def shifted(self, step: int) -> "SliceKey":
        return SliceKey(self.complex, self.genus, self.degree + step)

    def __str__(self):
        return f"{self.complex} g={self.genus} k={self.degree} (V={self.vertices}, E={self.edges})"


@dataclass(frozen=True)
class SliceBasis:
    key: SliceKey
    graphs: tuple

    def index(self):
        return {g: i for i, g in enumerate(self.graphs)}

    def __len__(self):
        return len(self.graphs)


class Cache:
    """Directory cache for slice bases and matrices."""

    def __init__(self, root):
        self.root = Path(root)
        self._checked = False

    @classmethod
    def from_env(cls, default="cache"):
        return cls(os.environ.get("GCX_CACHE", default))

    def _ensure(self):
        if self._checked:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        stamp = self.root / "conventions.txt"
        if stamp.exists() and stamp.read_text().strip() != CONVENTIONS_VERSION:
            log.info("convention version changed, clearing %s", self.root)
            for child in self.root.iterdir():
                if child.is_dir():
                    shutil.rmtree(child)
            stamp.unlink()
        if not stamp.exists():
            _atomic_write(stamp, CONVENTIONS_VERSION + "\n")
        self._checked = True

    def path(self, key: SliceKey, suffix: str) -> Path:
        return self.root / key.complex.slug / f"g{key.genus}" / f"k{key.degree}.{suffix}"

    def read(self, key, suffix):
        self._ensure()
        p = self.path(key, suffix)
        return p.read_text() if p.exists() else None

    def write(self, key, suffix, text):
        self._ensure()
        p = self.path(key, suffix)
        p.parent.mkdir(parents=True, exist_ok=True)
        _atomic_write(p, text)

    def clear(self):
        if self.root.exists():
            shutil.rmtree(self.root)
        self._checked = False


def _atomic_write(path: Path, text: str):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


_cache = None
_memo_basis = {}
_memo_matrix = {}


def set_cache(cache):
    """Use ``cache`` (a Cache, a path, or None) for subsequent computations."""
    global _cache
    _cache = Cache(cache) if isinstance(cache, (str, Path)) else cache
    clear_memo()


def clear_memo():
    """Forget slices computed in this process (the disk cache is untouched)."""
    _memo_basis.clear()
    _memo_matrix.clear()


def get_cache():
    return _cache


# ---------------------------------------------------------------------------


def slice_basis(key: SliceKey) -> SliceBasis:
    if key in _memo_basis:
        return _memo_basis[key]
    n, e = key.vertices, key.edges
    parity = key.complex.parity
    graphs = None
    if _cache is not None:
        text = _cache.read(key, "basis")
        if text is not None:
            graphs = []
            for line in text.splitlines():
                if line.strip():
                    cg, sign = canonicalize(parse_graph(line), parity)
                    graphs.append(cg)
    if graphs is None:
        if n < 1 or e < 0 or key.genus < 0:
            graphs = []
        else:
            graphs = enumerate_digraphs(n, e, key.complex.constraints, parity)
        if _cache is not None:
            _cache.write(key, "basis", "".join(g.literal() + "\n" for g in graphs))
    basis = SliceBasis(key, tuple(graphs))
    _memo_basis[key] = basis
    return basis


def slice_matrix(key: SliceKey) -> SparseRationalMatrix:
    """Matrix of the differential from slice k to slice k+1."""
    if key in _memo_matrix:
        return _memo_matrix[key]
    source = slice_basis(key)
    target = slice_basis(key.shifted(1))
    mat = None
    if _cache is not None:
        text = _cache.read(key, "smat")
        if text is not None:
            mat = SparseRationalMatrix.loads(text)
    if mat is None:
        index = target.index()
        columns = []
        for g in source.graphs:
            image = differential(GraphSum(g.parity, {g: 1}), key.complex)
            col = {}
            for h, c in image.terms.items():
                if h not in index:
                    raise AssertionError(f"image {h.literal()} missing from basis of {target.key}")
                col[index[h]] = c
            columns.append(col)
        mat = SparseRationalMatrix.from_columns(len(target), columns)
        if _cache is not None:
            _cache.write(key, "smat", mat.dumps())
    _memo_matrix[key] = mat
    return mat


def betti(key: SliceKey) -> int:
    """dim ker(delta out of k) - rank(delta into k)."""
    dim = len(slice_basis(key))
    if dim == 0:
        return 0
    out_rank = rank(slice_matrix(key))
    prev = key.shifted(-1)
    in_rank = rank(slice_matrix(prev)) if len(slice_basis(prev)) else 0
    return dim - out_rank - in_rank


def to_vector(x: GraphSum, basis: SliceBasis):
    index = basis.index()
    v = [Fraction(0)] * len(basis)
    for g, c in x.terms.items():
        if g not in index:
            raise DomainError(f"{g.literal()} is not in slice {basis.key}")
        v[index[g]] = c
    return v


def from_vector(v, basis: SliceBasis) -> GraphSum:
    return GraphSum(basis.key.complex.parity, {g: c for g, c in zip(basis.graphs, v) if c})


def lift(target: GraphSum, key: SliceKey):
    """Some x in slice k with differential(x) = target, or None."""
    d = key.complex.dimension
    for g in target.terms:
        if degree(g, d) != key.degree + 1 or genus(g) != key.genus:
            raise DomainError(f"{g.literal()} is not in the degree-{key.degree + 1} genus-{key.genus} slice")
    if target.is_zero():
        return GraphSum(key.complex.parity)
    source = slice_basis(key)
    if not len(source):
        return None
    mat = slice_matrix(key)
    b = to_vector(target, slice_basis(key.shifted(1)))
    x = solve(mat, b)
    if x is None:
        return None
    result = from_vector(x, source)
    if differential(result, key.complex) != target:
        raise AssertionError("lift failed re-verification")
    return result


def betti_table(complex_id: ComplexId, genera, degrees):
    return {(g, k): betti(SliceKey(complex_id, g, k)) for g in genera for k in degrees}

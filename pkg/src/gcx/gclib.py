"""The directed graph operad, its Lie bracket and the graph complexes.

Elements are finite rational combinations of canonical graphs.  Vertices
are symmetrised; a bundle of k parallel edges is read as the class of its k!
edge labellings.  In terms of the vertex-averaged graph A(G) a basis element
is therefore G = A(G) / prod(k!), and on averaged graphs the bracket is just
the sum over all ways of inserting one graph into a vertex of the other:

    [x, y] = x . y - (-1)^{|x||y|} y . x,
    x . y  = sum over vertices v of x and reattachments of the edges at v.

With this normalisation sum_k hbar^(k-1) theta_k is Maurer-Cartan with unit
coefficients, as it should be.

Orientation bookkeeping for an insertion at vertex i of g1 (n1 vertices):
for odd d the vertex order of g1 is rewritten as (others) ^ v_i, which costs
(-1)^(n1 - i), and v_i is replaced by the vertices of g2 in order; for even d
the edges of g1 come first, then those of g2.  With these rules the
insertion is graded pre-Lie, so the bracket satisfies Jacobi.

The differential of each complex is [e, .] with e the single edge, followed
by a check that everything outside the complex has cancelled.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial

from .graphcore import (
    DGC_CONSTRAINTS,
    GCOR_CONSTRAINTS,
    CanonicalGraph,
    ConstraintSet,
    DiGraph,
    GraphInputError,
    Parity,
    _check,
    canonicalize,
    canonicalize_raw,
    parse_graph,
)


class DomainError(ValueError):
    """An operation was applied outside its domain."""


def degree(g, d: int) -> int:
    """Homological degree d(V-1) + (1-d)E."""
    return d * (g.vertex_count - 1) + (1 - d) * len(g.edges)


def genus(g) -> int:
    """Loop order E - V + 1 of a connected graph."""
    graph = g.graph if isinstance(g, CanonicalGraph) else g
    if not graph.is_connected():
        raise DomainError("genus is only defined for connected graphs")
    return len(graph.edges) - graph.vertex_count + 1


class GraphSum:
    """A finite rational combination of canonical graphs of one parity."""

    __slots__ = ("terms", "parity")

    def __init__(self, parity: Parity, terms=None):
        self.parity = parity
        self.terms = {}
        if terms:
            for g, c in terms.items():
                if c:
                    self.terms[g] = Fraction(c)

    @classmethod
    def from_graph(cls, g: DiGraph, parity: Parity, coeff=1) -> "GraphSum":
        out = cls(parity)
        out.add_graph(g, coeff)
        return out

    def add_graph(self, g: DiGraph, coeff=1):
        res = canonicalize(g, self.parity)
        if res is not None:
            cg, sign = res
            self._add(cg, sign * Fraction(coeff))

    def _add(self, cg, coeff):
        v = self.terms.get(cg, 0) + coeff
        if v:
            self.terms[cg] = v
        else:
            self.terms.pop(cg, None)

    def _check_parity(self, other):
        if self.parity is not other.parity:
            raise DomainError("graph sums of different parity")

    def __add__(self, other):
        self._check_parity(other)
        out = GraphSum(self.parity, self.terms)
        for g, c in other.terms.items():
            out._add(g, c)
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return GraphSum(self.parity, {g: -c for g, c in self.terms.items()})

    def __mul__(self, scalar):
        scalar = Fraction(scalar)
        return GraphSum(self.parity, {g: c * scalar for g, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, GraphSum) and self.parity is other.parity and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, g) -> Fraction:
        if isinstance(g, DiGraph):
            res = canonicalize(g, self.parity)
            if res is None:
                return Fraction(0)
            return self.terms.get(res[0], Fraction(0)) * res[1]
        return self.terms.get(g, Fraction(0))

    def degrees(self, d: int):
        return {degree(g, d) for g in self.terms}

    def homogeneous_degree(self, d: int):
        degs = self.degrees(d)
        if len(degs) > 1:
            raise DomainError(f"inhomogeneous combination (degrees {sorted(degs)})")
        return degs.pop() if degs else None

    def split_by_degree(self, d: int):
        parts = {}
        for g, c in self.terms.items():
            parts.setdefault(degree(g, d), GraphSum(self.parity)).terms[g] = c
        return parts

    def split_by_genus_degree(self, d: int):
        parts = {}
        for g, c in self.terms.items():
            key = (genus(g), degree(g, d))
            parts.setdefault(key, GraphSum(self.parity)).terms[g] = c
        return parts

    def __repr__(self):
        return "GraphSum(" + ", ".join(f"{c}*{g.literal()}" for g, c in self) + ")"


# ---------------------------------------------------------------------------
# insertion and bracket


def _insert_raw(n1, edges1, i, n2, edges2, odd):
    """Terms of g1 o_i g2 on 0-indexed data; yields (n, edges, sign)."""
    # old vertex -> new index for the vertices of g1 that stay
    place = {}
    for v in range(n1):
        if v != i:
            place[v] = len(place)
    base = n1 - 1
    sign = -1 if (odd and (n1 - 1 - i) % 2) else 1
    slots = []
    for t, h in edges1:
        if t == i:
            slots.append(0)
        elif h == i:
            slots.append(1)
        else:
            slots.append(None)
    moving = [k for k, s in enumerate(slots) if s is not None]
    tail2 = tuple((base + t, base + h) for t, h in edges2)
    for choice in product(range(n2), repeat=len(moving)):
        pick = dict(zip(moving, choice))
        new = []
        for k, (t, h) in enumerate(edges1):
            s = slots[k]
            if s is None:
                new.append((place[t], place[h]))
            elif s == 0:
                new.append((base + pick[k], place[h]))
            else:
                new.append((place[t], base + pick[k]))
        yield n1 - 1 + n2, tuple(new) + tail2, sign


def insert(g1: DiGraph, i: int, g2: DiGraph, p: Parity) -> GraphSum:
    """Substitute g2 for vertex i (1-indexed) of g1, summing reattachments."""
    if not 1 <= i <= g1.vertex_count:
        raise GraphInputError(f"vertex {i} not in 1..{g1.vertex_count}")
    out = GraphSum(p)
    e1 = [(t - 1, h - 1) for t, h in g1.edges]
    e2 = [(t - 1, h - 1) for t, h in g2.edges]
    scale = Fraction(1, edge_symmetry(e1) * edge_symmetry(e2))
    for n, edges, sign in _insert_raw(g1.vertex_count, e1, i - 1, g2.vertex_count, e2, p is Parity.ODD):
        res = canonicalize_raw(n, edges, p)
        if res is not None:
            key, s = res
            out._add(_cg(n, key, p), sign * s * scale * edge_symmetry(key))
    return out


_CG_CACHE = {}


def _cg(n, key, p):
    cg = _CG_CACHE.get((n, key, p))
    if cg is None:
        cg = CanonicalGraph(n, tuple((t + 1, h + 1) for t, h in key), p)
        _CG_CACHE[(n, key, p)] = cg
    return cg


def edge_symmetry(edges) -> int:
    """prod(k!) over bundles of k parallel edges."""
    counts = {}
    for e in edges:
        counts[e] = counts.get(e, 0) + 1
    out = 1
    for k in counts.values():
        out *= factorial(k)
    return out


def _zero_based(g: CanonicalGraph):
    return tuple((t - 1, h - 1) for t, h in g.edges)


def pre_lie(x: GraphSum, y: GraphSum) -> GraphSum:
    """x . y: insert y into every vertex of x."""
    x._check_parity(y)
    p = x.parity
    odd = p is Parity.ODD
    acc = {}
    for a, ca in x.terms.items():
        ea = _zero_based(a)
        for b, cb in y.terms.items():
            eb = _zero_based(b)
            coeff = ca * cb / (edge_symmetry(ea) * edge_symmetry(eb))
            for i in range(a.vertex_count):
                for n, edges, sign in _insert_raw(a.vertex_count, ea, i, b.vertex_count, eb, odd):
                    res = canonicalize_raw(n, edges, p)
                    if res is not None:
                        k = (n, res[0])
                        acc[k] = acc.get(k, 0) + sign * res[1] * coeff
    out = GraphSum(p)
    for (n, key), c in acc.items():
        if c:
            out.terms[_cg(n, key, p)] = Fraction(c) * edge_symmetry(key)
    return out


def bracket(x: GraphSum, y: GraphSum, d: int) -> GraphSum:
    """Lie bracket of homogeneous combinations in dimension d."""
    if x.parity is not Parity.of_dimension(d) or y.parity is not Parity.of_dimension(d):
        raise DomainError(f"parity does not match dimension {d}")
    if x.is_zero() or y.is_zero():
        return GraphSum(x.parity)
    dx = x.homogeneous_degree(d)
    dy = y.homogeneous_degree(d)
    first = pre_lie(x, y)
    second = pre_lie(y, x)
    if (dx * dy) % 2:
        return first + second
    return first - second


# ---------------------------------------------------------------------------
# complexes


FAMILIES = ("dfGC", "dGC", "GCor")


@dataclass(frozen=True)
class ComplexId:
    family: str
    dimension: int

    def __post_init__(self):
        fam = {"dfgc": "dfGC", "dgc": "dGC", "gcor": "GCor"}.get(self.family.lower())
        if fam is None:
            raise DomainError(f"unknown complex family {self.family!r}")
        object.__setattr__(self, "family", fam)

    @property
    def parity(self) -> Parity:
        return Parity.of_dimension(self.dimension)

    @property
    def constraints(self) -> ConstraintSet:
        if self.family == "dGC":
            return DGC_CONSTRAINTS
        if self.family == "GCor":
            return GCOR_CONSTRAINTS
        return ConstraintSet()

    def contains(self, g: CanonicalGraph) -> bool:
        return _check(g.vertex_count, _zero_based(g), self.constraints)

    @property
    def slug(self) -> str:
        return f"{self.family}-d{self.dimension}"

    def __str__(self):
        return self.slug


class ClosureError(AssertionError):
    """Terms outside the complex survived cancellation."""


def single_edge(d: int) -> GraphSum:
    return GraphSum.from_graph(DiGraph(2, ((1, 2),)), Parity.of_dimension(d))


def differential(x: GraphSum, c: ComplexId) -> GraphSum:
    """delta x = [e, x] restricted to the complex c."""
    for g in x.terms:
        if not c.contains(g):
            raise DomainError(f"{g.literal()} is not a graph of {c}")
    out = GraphSum(x.parity)
    for part in x.split_by_degree(c.dimension).values():
        out = out + bracket(single_edge(c.dimension), part, c.dimension)
    stray = [g for g in out.terms if not c.contains(g)]
    if stray:
        raise ClosureError(f"{len(stray)} terms outside {c} survived, e.g. {stray[0].literal()}")
    return out


# ---------------------------------------------------------------------------
# power series in hbar


class HbarSeries:
    """Truncated series sum_k hbar^k x_k with x_k of a common kind.

    The coefficients are GraphSum or LegGraphSum; only +, -, scaling and
    iteration are used here, so both kinds work.
    """

    def __init__(self, truncation_order: int, coefficients, hbar_degree: int = 2):
        coefficients = list(coefficients)
        if len(coefficients) != truncation_order + 1:
            raise DomainError("need exactly one coefficient per power 0..N")
        self.truncation_order = truncation_order
        self.coefficients = coefficients
        self.hbar_degree = hbar_degree

    def __getitem__(self, k):
        return self.coefficients[k]

    def _check(self, other):
        if self.truncation_order != other.truncation_order:
            raise DomainError("mismatched truncation orders")

    def __add__(self, other):
        self._check(other)
        return HbarSeries(self.truncation_order, [a + b for a, b in zip(self.coefficients, other.coefficients)], self.hbar_degree)

    def __sub__(self, other):
        self._check(other)
        return HbarSeries(self.truncation_order, [a - b for a, b in zip(self.coefficients, other.coefficients)], self.hbar_degree)

    def __neg__(self):
        return HbarSeries(self.truncation_order, [-a for a in self.coefficients], self.hbar_degree)

    def __mul__(self, scalar):
        return HbarSeries(self.truncation_order, [a * scalar for a in self.coefficients], self.hbar_degree)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (
            isinstance(other, HbarSeries)
            and self.truncation_order == other.truncation_order
            and self.coefficients == other.coefficients
        )

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.coefficients)

    def truncate(self, n: int) -> "HbarSeries":
        coeffs = self.coefficients[: n + 1]
        while len(coeffs) < n + 1:
            coeffs.append(self.coefficients[0] * 0)
        return HbarSeries(n, coeffs, self.hbar_degree)

    def __iter__(self):
        return iter(self.coefficients)

    def __repr__(self):
        inner = ", ".join(f"hbar^{k}: {a!r}" for k, a in enumerate(self.coefficients) if not a.is_zero())
        return f"HbarSeries(N={self.truncation_order}; {inner})"


def hbar_bracket(x: HbarSeries, y: HbarSeries, d: int) -> HbarSeries:
    """hbar-bilinear bracket, truncated at the common order."""
    x._check(y)
    if x.hbar_degree != y.hbar_degree:
        raise DomainError("mismatched hbar degrees")
    n = x.truncation_order
    h = x.hbar_degree
    parity = Parity.of_dimension(d)
    out = [GraphSum(parity) for _ in range(n + 1)]
    for i, a in enumerate(x.coefficients):
        for j, b in enumerate(y.coefficients):
            if i + j > n or a.is_zero() or b.is_zero():
                continue
            for da, pa in a.split_by_degree(d).items():
                # moving hbar^j past a costs (-1)^(j h |a|)
                s = -1 if (j * h * da) % 2 else 1
                for pb in b.split_by_degree(d).values():
                    out[i + j] = out[i + j] + bracket(pa, pb, d) * s
    return HbarSeries(n, out, h)


def hbar_differential(x: HbarSeries, n: int, d: int = 3) -> HbarSeries:
    """[phi_hbar(n), x], truncated at hbar^n."""
    return hbar_bracket(phi_hbar(n, d, x.hbar_degree), x.truncate(n), d)


def mc_residual(x, d: int):
    """[x, x]; zero exactly when x is Maurer-Cartan through the truncation."""
    if isinstance(x, HbarSeries):
        return hbar_bracket(x, x, d)
    return bracket(x, x, d)


# ---------------------------------------------------------------------------
# distinguished elements


def theta(k: int, d: int) -> GraphSum:
    """Two vertices joined by k parallel edges in the same direction."""
    return GraphSum.from_graph(DiGraph(2, ((1, 2),) * k), Parity.of_dimension(d))


def phi_hbar(n: int, d: int = 3, hbar_degree: int = 2) -> HbarSeries:
    """sum_{k>=1} hbar^(k-1) theta_k, truncated at hbar^n."""
    return HbarSeries(n, [theta(k + 1, d) for k in range(n + 1)], hbar_degree)


def loop_class(n: int, d: int = 3, hbar_degree: int = 2) -> HbarSeries:
    """sum_{k>=2} (k-1) hbar^(k-2) theta_k, truncated at hbar^n."""
    return HbarSeries(n, [theta(k + 2, d) * (k + 1) for k in range(n + 1)], hbar_degree)


# The three summands of the genus-2 class of GC^or_2, edges as drawn.
UPSILON4_SHAPES = (
    (1, DiGraph(4, ((1, 4), (4, 2), (4, 3), (1, 2), (1, 3)))),
    (2, DiGraph(4, ((3, 4), (2, 4), (2, 3), (1, 2), (1, 3)))),
    (1, DiGraph(4, ((2, 4), (3, 4), (4, 1), (2, 1), (3, 1)))),
)

# Orientation signs: the drawings fix the shapes and the weights 1, 2, 1 but
# not an ordering of the edges.  With the edge lists above read as
# orientations these signs make the combination closed.
UPSILON4_SIGNS = (1, -1, 1)


def upsilon4() -> GraphSum:
    out = GraphSum(Parity.EVEN)
    for (w, g), s in zip(UPSILON4_SHAPES, UPSILON4_SIGNS):
        out.add_graph(g, w * s)
    return out


def make_special(name: str, **params):
    """Named elements: single_edge, theta, phi_hbar, loop_class, upsilon4, hairy_class."""
    d = params.get("d", 3)
    if name == "single_edge":
        return single_edge(d)
    if name == "theta":
        return theta(params["k"], d)
    if name == "phi_hbar":
        return phi_hbar(params["N"], d, params.get("hbar_degree", 2))
    if name == "loop_class":
        return loop_class(params["N"], d, params.get("hbar_degree", 2))
    if name == "upsilon4":
        return upsilon4()
    if name == "hairy_class":
        from .propcalc import hairy_class

        return hairy_class(params["max_legs"], params.get("c", 1), params.get("d", 1))
    raise DomainError(f"unknown special element {name!r}")


# ---------------------------------------------------------------------------
# linear-combination files


_TERM_RE = re.compile(r"^(?:hbar\^(\d+)\s+)?([-+]?\d+(?:/\d+)?)\s+(\S.*)$")


def parse_terms(text: str):
    """Yield (power or None, coefficient, literal) from a combination file."""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _TERM_RE.match(line)
        if not m:
            raise GraphInputError(f"line {lineno}: cannot parse {raw!r}")
        power = int(m.group(1)) if m.group(1) is not None else None
        yield power, Fraction(m.group(2)), m.group(3).strip()


def _coeff_text(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def format_sum(x: GraphSum) -> str:
    return "".join(f"{_coeff_text(c)} {g.literal()}\n" for g, c in x)


def format_series(x: HbarSeries) -> str:
    lines = []
    for k, a in enumerate(x.coefficients):
        for g, c in a:
            lines.append(f"hbar^{k} {_coeff_text(c)} {g.literal()}\n")
    return "".join(lines)


def parse_sum(text: str, d: int):
    """Read a combination file; returns GraphSum, or HbarSeries if powers appear."""
    parity = Parity.of_dimension(d)
    terms = list(parse_terms(text))
    if any(p is not None for p, _, _ in terms):
        top = max(p or 0 for p, _, _ in terms)
        coeffs = [GraphSum(parity) for _ in range(top + 1)]
        for p, c, lit in terms:
            coeffs[p or 0].add_graph(parse_graph(lit), c)
        return HbarSeries(top, coeffs)
    out = GraphSum(parity)
    for _, c, lit in terms:
        out.add_graph(parse_graph(lit), c)
    return out

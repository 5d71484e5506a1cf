"""Leg graphs, the properads Holieb_{c,d} and Holieb^diamond_{c,d}, their
derivation complexes, and the maps from the oriented graph complex.

Signs come from a cell model.  A leg graph in block form is the ordered
tensor product

    cores of the vertices, (out-half, in-half) of each internal edge,
    out-legs by label, in-legs by label,

where a core has parity 1+c+d, an out-half (or out-leg) parity c and an
in-half (or in-leg) parity d.  A corolla is its core followed by its out-
and in-slots, which reproduces the generator symmetry (-1)^{c|sigma|+d|tau|}.
Every operation below rewrites such a word and reorders it back to block
form; the sign is the Koszul sign of the reordering.

An element of a Der complex is stored by its values on generators, up to
relabelling of legs.  Because the derivation complex is built from
sgn_m^c x sgn_n^d twisted invariants, the slot parity of a leg cancels
against the twist: relabelling legs carries no sign there.  Vertex cores
and internal edges keep their parities.  The stored coefficient of a
class R is the sum of the coefficients of all labelled terms of the value
that are equivalent to R, so for example F(Gamma) at arity (m, n) stores
the number of leg attachments giving each shape.

Diamond elements carry an hbar exponent a: hbar^a R is a value on the
generators of weight a.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from math import factorial

from .gclib import DomainError, GraphSum, HbarSeries, edge_symmetry
from .graphcore import DiGraph, GraphInputError, Parity, canonical_leaves, perm_sign, sorting_sign

# A labelled leg graph is kept internally as a tuple
#     (n, weights, edges, outs, ins)
# with 0-indexed vertices; outs[j] is the carrier of out-leg j.


@dataclass(frozen=True)
class LegGraph:
    vertex_count: int
    edges: tuple
    out_legs: tuple
    in_legs: tuple
    weights: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(t), int(h)) for t, h in self.edges))
        object.__setattr__(self, "out_legs", tuple(int(v) for v in self.out_legs))
        object.__setattr__(self, "in_legs", tuple(int(v) for v in self.in_legs))
        w = tuple(int(a) for a in self.weights) or (0,) * self.vertex_count
        object.__setattr__(self, "weights", w)
        n = self.vertex_count
        if len(w) != n:
            raise GraphInputError("one weight per vertex expected")
        for t, h in self.edges:
            if not (1 <= t <= n and 1 <= h <= n) or t == h:
                raise GraphInputError(f"bad internal edge {t}>{h}")
        if n == 0:
            if self.edges or self.out_legs != (0,) or self.in_legs != (0,):
                raise GraphInputError("the only vertex-free leg graph is the pass-through edge")
            return
        for v in self.out_legs + self.in_legs:
            if not 1 <= v <= n:
                raise GraphInputError(f"leg carrier {v} not in 1..{n}")

    @classmethod
    def from_internal(cls, g):
        n, w, edges, outs, ins = g
        if n == 0:
            return PASS_THROUGH
        return cls(n, tuple((t + 1, h + 1) for t, h in edges), tuple(v + 1 for v in outs), tuple(v + 1 for v in ins), w)

    def internal(self):
        if self.vertex_count == 0:
            return PASS_INTERNAL
        return (
            self.vertex_count,
            self.weights,
            tuple((t - 1, h - 1) for t, h in self.edges),
            tuple(v - 1 for v in self.out_legs),
            tuple(v - 1 for v in self.in_legs),
        )

    @property
    def out_arity(self):
        return len(self.out_legs)

    @property
    def in_arity(self):
        return len(self.in_legs)

    @property
    def digraph(self) -> DiGraph:
        return DiGraph(self.vertex_count, self.edges)

    def literal(self) -> str:
        parts = [str(self.vertex_count)]
        if any(self.weights):
            parts.append("w=" + ",".join(map(str, self.weights)))
        parts.append("e=" + ",".join(f"{t}>{h}" for t, h in self.edges))
        parts.append("out=" + ",".join(map(str, self.out_legs)))
        parts.append("in=" + ",".join(map(str, self.in_legs)))
        return "lg(" + ";".join(parts) + ")"

    def __str__(self):
        return self.literal()


PASS_INTERNAL = (0, (), (), (0,), (0,))
PASS_THROUGH = LegGraph(0, (), (0,), (0,), ())

_LG_RE = re.compile(r"^lg\((\d+)((?:;[a-z]+=[0-9>,\s]*)*)\)$")


def parse_leggraph(text: str) -> LegGraph:
    m = _LG_RE.match(text.strip().replace(" ", ""))
    if not m:
        raise GraphInputError(f"not a leg graph literal: {text!r}")
    fields = {}
    for part in m.group(2).split(";")[1:]:
        name, _, body = part.partition("=")
        if name in fields or name not in ("w", "e", "out", "in"):
            raise GraphInputError(f"bad field {name!r} in {text!r}")
        fields[name] = [x for x in body.split(",") if x]
    if "out" not in fields or "in" not in fields:
        raise GraphInputError(f"leg graph literal needs out= and in=: {text!r}")
    try:
        edges = tuple(tuple(int(y) for y in x.split(">")) for x in fields.get("e", []))
        if any(len(e) != 2 for e in edges):
            raise ValueError
        return LegGraph(
            int(m.group(1)),
            edges,
            tuple(int(x) for x in fields["out"]),
            tuple(int(x) for x in fields["in"]),
            tuple(int(x) for x in fields.get("w", [])),
        )
    except ValueError as exc:
        raise GraphInputError(f"bad leg graph literal {text!r}") from exc


def corolla(m: int, n: int, a: int = 0) -> LegGraph:
    return LegGraph(1, (), (1,) * m, (1,) * n, (a,))


# ---------------------------------------------------------------------------
# validity and degrees


def _arities(g):
    n, w, edges, outs, ins = g
    mo = [0] * n
    mi = [0] * n
    for t, h in edges:
        mo[t] += 1
        mi[h] += 1
    for v in outs:
        mo[v] += 1
    for v in ins:
        mi[v] += 1
    return mo, mi


def valid_vertex(m: int, n: int, a: int = 0) -> bool:
    return m >= 1 and n >= 1 and m + n + a >= 3


def _valid_plus(m, n, a=0):
    # generators of the extended properad: the valid corollas and D = (1,1)
    return m >= 1 and n >= 1


def _acyclic(n, edges):
    from .graphcore import _acyclic as acyc

    return acyc(n, edges)


def check_leggraph(lg: LegGraph, diamond: bool = False):
    """Raise GraphInputError unless lg satisfies the leg graph invariants."""
    if lg.vertex_count == 0:
        return
    g = lg.internal()
    if not diamond and any(lg.weights):
        raise GraphInputError("weights are only allowed in the diamond theory")
    mo, mi = _arities(g)
    for v in range(lg.vertex_count):
        if not valid_vertex(mo[v], mi[v], lg.weights[v]):
            raise GraphInputError(f"vertex {v + 1} of {lg.literal()} is not a valid corolla")
    if not _acyclic(g[0], g[2]):
        raise GraphInputError(f"{lg.literal()} has a directed cycle")


def corolla_degree(m, n, a, c, d) -> int:
    return 1 + c * (1 - m - a) + d * (1 - n - a)


def der_degree(g, hbar_power, c, d) -> int:
    """Degree in the derivation complex of the value hbar^a g."""
    n, w, edges, outs, ins = g
    if n == 0:
        return -1
    mo, mi = _arities(g)
    total = sum(corolla_degree(mo[v], mi[v], w[v], c, d) for v in range(n))
    return total + (c + d) * hbar_power - (1 + c * (1 - len(outs)) + d * (1 - len(ins)))


# ---------------------------------------------------------------------------
# the cell model


def _parities(c, d):
    return {"c": (1 + c + d) % 2, "Rc": (1 + c + d) % 2, "eo": c % 2, "ol": c % 2, "Reo": c % 2, "ei": d % 2, "il": d % 2, "Rei": d % 2}


def _block(g, tag=""):
    n, w, edges, outs, ins = g
    toks = [("c", v) for v in range(n)]
    for k in range(len(edges)):
        toks.append(("eo", k))
        toks.append(("ei", k))
    toks.extend(("ol", j) for j in range(len(outs)))
    toks.extend(("il", j) for j in range(len(ins)))
    return toks


def _koszul(src, dst, par) -> int:
    pos = {t: i for i, t in enumerate(dst)}
    seq = [pos[t] for t in src if par[t[0]]]
    inv = 0
    for i in range(len(seq)):
        si = seq[i]
        for j in range(i + 1, len(seq)):
            if seq[j] < si:
                inv += 1
    return -1 if inv % 2 else 1


def _halves(g, w):
    """Tokens of the slots of vertex w: (out edge halves, out legs, in edge halves, in legs)."""
    n, weights, edges, outs, ins = g
    oe = [("eo", k) for k, (t, h) in enumerate(edges) if t == w]
    ie = [("ei", k) for k, (t, h) in enumerate(edges) if h == w]
    ol = [("ol", j) for j, v in enumerate(outs) if v == w]
    il = [("il", j) for j, v in enumerate(ins) if v == w]
    return oe, ol, ie, il


def _substitute(g, w, front_out, front_in, rn, rw, redges, assign, par):
    """Replace the core of vertex w by a graph on rn vertices.

    ``front_out``/``front_in`` list the slots of w in the order in which the
    replacement's legs are numbered; ``assign`` maps each slot token to a
    vertex of the replacement.  Returns (new labelled graph, sign).
    """
    n, weights, edges, outs, ins = g
    toks = _block(g)
    front = [("c", w)] + front_out + front_in
    fset = set(front)
    rest = [t for t in toks if t not in fset]
    s1 = _koszul(toks, front + rest, par)
    rint = [("Rc", r) for r in range(rn)]
    for k in range(len(redges)):
        rint.append(("Reo", k))
        rint.append(("Rei", k))
    word = rint + front_out + front_in + rest

    base = n - 1

    def vm(v):
        return v if v < w else v - 1

    new_edges = []
    for k, (t, h) in enumerate(edges):
        t2 = base + assign[("eo", k)] if t == w else vm(t)
        h2 = base + assign[("ei", k)] if h == w else vm(h)
        new_edges.append((t2, h2))
    new_edges.extend((base + t, base + h) for t, h in redges)
    new_outs = tuple(base + assign[("ol", j)] if v == w else vm(v) for j, v in enumerate(outs))
    new_ins = tuple(base + assign[("il", j)] if v == w else vm(v) for j, v in enumerate(ins))
    new_w = tuple(a for v, a in enumerate(weights) if v != w) + tuple(rw)

    target = [("c", v) for v in range(n) if v != w] + [("Rc", r) for r in range(rn)]
    for k in range(len(edges)):
        target.append(("eo", k))
        target.append(("ei", k))
    for k in range(len(redges)):
        target.append(("Reo", k))
        target.append(("Rei", k))
    target.extend(("ol", j) for j in range(len(outs)))
    target.extend(("il", j) for j in range(len(ins)))
    s2 = _koszul(word, target, par)
    return (n - 1 + rn, new_w, tuple(new_edges), new_outs, new_ins), s1 * s2


@lru_cache(maxsize=1 << 20)
def _der_canon(g, core_odd, edge_odd):
    n, w, edges, outs, ins = g
    if n == 0:
        return g, 1
    if edge_odd and len(set(edges)) < len(edges):
        return None
    oc = [0] * n
    ic = [0] * n
    for v in outs:
        oc[v] += 1
    for v in ins:
        ic[v] += 1
    initial = [(w[v], oc[v], ic[v]) for v in range(n)]
    key_edges, perms = canonical_leaves(n, edges, initial)
    signs = set()
    for perm in perms:
        s = perm_sign(perm) if core_odd else 1
        if edge_odd:
            s *= sorting_sign([(perm[t], perm[h]) for t, h in edges])
        signs.add(s)
        if len(signs) > 1:
            return None
    perm = perms[0]
    inv = [0] * n
    for v, p in enumerate(perm):
        inv[p] = v
    key = (
        n,
        tuple(w[inv[i]] for i in range(n)),
        key_edges,
        tuple(sorted(perm[v] for v in outs)),
        tuple(sorted(perm[v] for v in ins)),
    )
    return key, signs.pop()


def der_canonicalize(g, c, d):
    """Canonical class of a labelled graph in the Der complex, or None."""
    return _der_canon(g, bool((1 + c + d) % 2), bool((c + d) % 2))


def leg_canonicalize(lg: LegGraph, c: int, d: int):
    """(canonical LegGraph, sign) or None when an automorphism acts by -1.

    Leg labels are forgotten without sign, as they are in the derivation
    complex; use ``leg_relabel_sign`` for the sign of a relabelling inside
    Holieb(m, n) itself.
    """
    check_leggraph(lg, diamond=True)
    res = der_canonicalize(lg.internal(), c, d)
    if res is None:
        return None
    key, sign = res
    return LegGraph.from_internal(key), sign


def leg_relabel_sign(lg: LegGraph, out_perm, in_perm, c: int, d: int) -> int:
    """Sign s with sigma . lg = s * (lg with legs relabelled) in Holieb(m, n).

    ``out_perm[i]`` is the new label of out-leg i (0-based).  The natural
    action moves slot cells, giving the Koszul sign of the permutation on
    out-slots (parity c) and in-slots (parity d).
    """
    s = 1
    if c % 2:
        s *= perm_sign(list(out_perm))
    if d % 2:
        s *= perm_sign(list(in_perm))
    return s


# ---------------------------------------------------------------------------
# combinations of leg graphs


class LegGraphSum:
    """Rational combination of hbar^a R, R a canonical leg graph.

    The plain theory only uses a = 0.
    """

    __slots__ = ("terms", "c", "d")

    def __init__(self, c: int, d: int, terms=None):
        self.c = c
        self.d = d
        self.terms = {}
        if terms:
            for k, v in terms.items():
                if v:
                    self.terms[k] = Fraction(v)

    def _add(self, key, coeff):
        v = self.terms.get(key, 0) + coeff
        if v:
            self.terms[key] = v
        else:
            self.terms.pop(key, None)

    def add_labelled(self, g, coeff, power=0):
        res = der_canonicalize(g, self.c, self.d)
        if res is not None:
            key, sign = res
            self._add((power, key), sign * coeff)

    def add_leggraph(self, lg: LegGraph, coeff=1, power=0):
        check_leggraph(lg, diamond=True)
        self.add_labelled(lg.internal(), Fraction(coeff), power)

    @classmethod
    def of(cls, lg: LegGraph, c, d, coeff=1, power=0):
        out = cls(c, d)
        out.add_leggraph(lg, coeff, power)
        return out

    def _compatible(self, other):
        if (self.c, self.d) != (other.c, other.d):
            raise DomainError("leg graph sums with different (c, d)")

    def __add__(self, other):
        self._compatible(other)
        out = LegGraphSum(self.c, self.d, self.terms)
        for k, v in other.terms.items():
            out._add(k, v)
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LegGraphSum(self.c, self.d, {k: -v for k, v in self.terms.items()})

    def __mul__(self, scalar):
        scalar = Fraction(scalar)
        return LegGraphSum(self.c, self.d, {k: v * scalar for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, LegGraphSum) and (self.c, self.d) == (other.c, other.d) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_zero(self):
        return not self.terms

    def __iter__(self):
        """(power, LegGraph, coefficient) in canonical order."""
        for (p, key), v in sorted(self.terms.items()):
            yield p, LegGraph.from_internal(key), v

    def coefficient(self, lg: LegGraph, power=0):
        res = der_canonicalize(lg.internal(), self.c, self.d)
        if res is None:
            return Fraction(0)
        key, sign = res
        return self.terms.get((power, key), Fraction(0)) * sign

    def restrict(self, predicate):
        """Keep terms hbar^p R for which predicate(p, m, n) holds."""
        return LegGraphSum(self.c, self.d, {(p, k): v for (p, k), v in self.terms.items() if predicate(p, len(k[3]), len(k[4]))})

    def truncate(self, max_legs=None, hbar_order=None):
        def keep(p, m, n):
            return (max_legs is None or m + n <= max_legs) and (hbar_order is None or p <= hbar_order)

        return self.restrict(keep)

    def degrees(self):
        return {der_degree(k, p, self.c, self.d) for p, k in self.terms}

    def homogeneous_degree(self):
        degs = self.degrees()
        if len(degs) > 1:
            raise DomainError(f"inhomogeneous derivation (degrees {sorted(degs)})")
        return degs.pop() if degs else None

    def max_power(self):
        return max((p for p, _ in self.terms), default=0)

    def __repr__(self):
        return "LegGraphSum(" + ", ".join(f"{v}*hbar^{p} {lg.literal()}" for p, lg, v in self) + ")"


def format_legsum(x: LegGraphSum, with_powers=None) -> str:
    if with_powers is None:
        with_powers = any(p for p, _ in x.terms)
    lines = []
    for p, lg, v in x:
        head = f"hbar^{p} " if with_powers else ""
        lines.append(f"{head}{v.numerator}/{v.denominator} {lg.literal()}\n")
    return "".join(lines)


def parse_legsum(text: str, c: int, d: int) -> LegGraphSum:
    from .gclib import parse_terms

    out = LegGraphSum(c, d)
    for power, coeff, lit in parse_terms(text):
        out.add_leggraph(parse_leggraph(lit), coeff, power or 0)
    return out


# ---------------------------------------------------------------------------
# splittings: the differentials of Holieb and Holieb^diamond


def _split_terms(g, w, c, d, diamond, par, unit=False):
    """All labelled splittings of vertex w; yields (graph, sign).

    The lower vertex keeps the out-slots not sent up and the new edges'
    tails; the upper one gets the remaining in-slots and the heads.  For
    the plain theory l = 1 and weights are 0; the diamond theory sums over
    l >= 1 edges and weights b + c' = a - l + 1.  With ``unit`` the new
    vertices may also be the (1,1) operation D of the extended properad.
    """
    ok = _valid_plus if unit else valid_vertex
    oe, ol, ie, il = _halves(g, w)
    outs = oe + ol
    ins = ie + il
    a = g[1][w]
    m_w, n_w = len(outs), len(ins)
    bundles = range(1, a + 2) if diamond else (1,)
    for l in bundles:
        redges = ((0, 1),) * l
        for up_mask in range(1 << m_w):
            for low_mask in range(1 << n_w):
                m_low = l + sum(1 for i in range(m_w) if not up_mask >> i & 1)
                m_up = sum(1 for i in range(m_w) if up_mask >> i & 1)
                n_low = sum(1 for i in range(n_w) if low_mask >> i & 1)
                n_up = l + n_w - n_low
                assign = {}
                for i, t in enumerate(outs):
                    assign[t] = 1 if up_mask >> i & 1 else 0
                for i, t in enumerate(ins):
                    assign[t] = 0 if low_mask >> i & 1 else 1
                for b in range(0, a - l + 2):
                    cu = a - l + 1 - b
                    if not diamond and (b or cu):
                        continue
                    if cu < 0:
                        continue
                    if not (ok(m_low, n_low, b) and ok(m_up, n_up, cu)):
                        continue
                    h, s = _substitute(g, w, outs, ins, 2, (b, cu), redges, assign, par)
                    yield h, Fraction(s, factorial(l))


def _delta(x: LegGraphSum, diamond: bool) -> LegGraphSum:
    par = _parities(x.c, x.d)
    out = LegGraphSum(x.c, x.d)
    for (p, key), coeff in x.terms.items():
        for w in range(key[0]):
            for g, s in _split_terms(key, w, x.c, x.d, diamond, par):
                out.add_labelled(g, s * coeff, p)
    return out


def delta_holieb(x: LegGraphSum) -> LegGraphSum:
    """The differential of Holieb_{c,d}, applied at every vertex."""
    for (p, key) in x.terms:
        if p or any(key[1]):
            raise DomainError("delta_holieb needs unweighted leg graphs")
    return _delta(x, diamond=False)


def delta_diamond(x: LegGraphSum) -> LegGraphSum:
    """The differential of Holieb^diamond_{c,d} (needs c + d even)."""
    if (x.c + x.d) % 2:
        raise DomainError("the diamond theory needs c + d even")
    return _delta(x, diamond=True)


# ---------------------------------------------------------------------------
# attaching legs "in all ways"


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _multinomial(counts):
    out = factorial(sum(counts))
    for k in counts:
        out //= factorial(k)
    return out


def _weightings(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    yield from _compositions(total, parts)


def _attach_at(g, w, tn, tedges, weight_total, par, check=True):
    """Sum over all maps from the slots of w to the vertices of a template.

    The template has tn vertices and edges ``tedges``; the vertex weights
    range over all distributions of ``weight_total`` (None means no
    weights).  Legs of w that are external legs of g only matter through
    how many go to each template vertex, so those are grouped with a
    multinomial multiplicity.  Yields (graph, sign, multiplicity).
    """
    oe, ol, ie, il = _halves(g, w)
    front_out = oe + ol
    front_in = ie + il
    if weight_total is None:
        weight_opts = [(0,) * tn]
    else:
        weight_opts = list(_weightings(weight_total, tn))
    for e_out in product(range(tn), repeat=len(oe)):
        for e_in in product(range(tn), repeat=len(ie)):
            for c_out in _compositions(len(ol), tn):
                for c_in in _compositions(len(il), tn):
                    assign = dict(zip(oe, e_out))
                    assign.update(zip(ie, e_in))
                    k = 0
                    for r, cnt in enumerate(c_out):
                        for t in ol[k:k + cnt]:
                            assign[t] = r
                        k += cnt
                    k = 0
                    for r, cnt in enumerate(c_in):
                        for t in il[k:k + cnt]:
                            assign[t] = r
                        k += cnt
                    mult = _multinomial(c_out) * _multinomial(c_in)
                    mo = [0] * tn
                    mi = [0] * tn
                    for t, h in tedges:
                        mo[t] += 1
                        mi[h] += 1
                    for t in front_out:
                        mo[assign[t]] += 1
                    for t in front_in:
                        mi[assign[t]] += 1
                    for ws in weight_opts:
                        if check and not all(valid_vertex(mo[r], mi[r], ws[r]) for r in range(tn)):
                            continue
                        h, s = _substitute(g, w, front_out, front_in, tn, ws, tedges, assign, par)
                        yield h, s, mult


def _gc_terms(x, D):
    """(vertex count, 0-indexed edges, coefficient) for a GraphSum in dimension D."""
    if x.parity is not Parity.of_dimension(D):
        raise DomainError(f"graph parity does not match dimension {D} = c + d + 1")
    for g, coeff in x.terms.items():
        # a stored coefficient refers to the graph with unlabelled parallel edges
        yield g.vertex_count, tuple((t - 1, h - 1) for t, h in g.edges), coeff / edge_symmetry(g.edges)


def _generators(max_legs, max_weight=None, unit=True):
    """Arities (m, n, a) on which a derivation takes values, within the truncation.

    With ``unit`` this includes (1, 1, 0), the extra operation D.
    """
    top = max_weight if max_weight is not None else 0
    ok = _valid_plus if unit else valid_vertex
    for a in range(top + 1):
        for total in range(2, max_legs + 1):
            for m in range(1, total):
                n = total - m
                if ok(m, n, a):
                    yield m, n, a


def map_F(x: GraphSum, c: int, d: int, max_legs: int) -> LegGraphSum:
    """F: GC^or_{c+d+1} -> Der(Holieb_{c,d}), on generators with m+n <= max_legs."""
    out = LegGraphSum(c, d)
    par = _parities(c, d)
    for tn, tedges, coeff in _gc_terms(x, c + d + 1):
        for m, n, _ in _generators(max_legs):
            gen = (1, (0,), (), (0,) * m, (0,) * n)
            for h, s, mult in _attach_at(gen, 0, tn, tedges, None, par):
                out.add_labelled(h, s * mult * coeff)
    return out


def map_F_diamond(x, c: int, d: int, max_legs: int, max_weight: int) -> LegGraphSum:
    """F^diamond on an hbar-series over GC^or_{c+d+1}."""
    if (c + d) % 2:
        raise DomainError("the diamond theory needs c + d even")
    if isinstance(x, GraphSum):
        x = HbarSeries(0, [x])
    out = LegGraphSum(c, d)
    par = _parities(c, d)
    for k, coeff_sum in enumerate(x.coefficients):
        for tn, tedges, coeff in _gc_terms(coeff_sum, c + d + 1):
            for m, n, a in _generators(max_legs, max_weight):
                if a < k:
                    continue
                gen = (1, (a,), (), (0,) * m, (0,) * n)
                for h, s, mult in _attach_at(gen, 0, tn, tedges, a - k, par):
                    out.add_labelled(h, s * mult * coeff, a)
    return out


def act_F(x: GraphSum, y: LegGraphSum, diamond_series=False, trees=False) -> LegGraphSum:
    """Apply the derivation F(x) (or F^diamond(x)) at every vertex of y's values.

    ``trees`` has the same meaning as for act_der.
    """
    c, d = y.c, y.d
    par = _parities(c, d)
    out = LegGraphSum(c, d)
    series = x if isinstance(x, HbarSeries) else HbarSeries(0, [x])
    for k, coeff_sum in enumerate(series.coefficients):
        for tn, tedges, coeff in _gc_terms(coeff_sum, c + d + 1):
            for (p, key), v in y.terms.items():
                mo, mi = _arities(key)
                for w in range(key[0]):
                    if trees and not all(valid_vertex(mo[u], mi[u], key[1][u]) for u in range(key[0]) if u != w):
                        continue
                    a = key[1][w]
                    if diamond_series:
                        if a < k:
                            continue
                        total = a - k
                    else:
                        if a:
                            continue
                        total = None
                    for h, s, mult in _attach_at(key, w, tn, tedges, total, par):
                        out.add_labelled(h, s * mult * coeff * v, p)
    return out


# ---------------------------------------------------------------------------
# general derivations: values stored up to leg relabelling


def _values_by_arity(x: LegGraphSum):
    table = {}
    for (p, key), v in x.terms.items():
        if key[0] == 0:
            continue
        table.setdefault((len(key[3]), len(key[4]), p), []).append((key, v))
    return table


def _apply_value_at(g, w, value, par):
    """Apply one stored value R (labelled, coefficient v) at vertex w of g.

    The value of the derivation on the corolla at w is the average of R
    over all identifications of its legs with the slots of w.  Slots that
    are external legs of g are interchangeable, so only the choice of
    which R-legs meet the internal edge halves of w matters, with weight
    (m-k)!(n-k')!/(m!n!).  Yields (graph, sign, weight).
    """
    oe, ol, ie, il = _halves(g, w)
    rn, rw, redges, routs, rins = value
    m, n = len(routs), len(rins)
    base = Fraction(factorial(m - len(oe)) * factorial(n - len(ie)), factorial(m) * factorial(n))
    for out_pick in permutations(range(m), len(oe)):
        rest_out = [i for i in range(m) if i not in out_pick]
        slot_of_out = {}
        for t, i in zip(oe, out_pick):
            slot_of_out[i] = t
        for t, i in zip(ol, rest_out):
            slot_of_out[i] = t
        front_out = [slot_of_out[i] for i in range(m)]
        for in_pick in permutations(range(n), len(ie)):
            rest_in = [j for j in range(n) if j not in in_pick]
            slot_of_in = {}
            for t, j in zip(ie, in_pick):
                slot_of_in[j] = t
            for t, j in zip(il, rest_in):
                slot_of_in[j] = t
            front_in = [slot_of_in[j] for j in range(n)]
            assign = {}
            for i, t in enumerate(front_out):
                assign[t] = routs[i]
            for j, t in enumerate(front_in):
                assign[t] = rins[j]
            h, s = _substitute(g, w, front_out, front_in, rn, rw, redges, assign, par)
            yield h, s, base


def act_der(x: LegGraphSum, y: LegGraphSum, trees=False) -> LegGraphSum:
    """x o y: apply the derivation x at every vertex of the values of y.

    With ``trees`` the graphs of y are two-vertex trees of the extended
    properad, and x is only applied at a vertex when the other one is an
    honest generator (terms with a bare D there cancel in the commutator).
    """
    x._compatible(y)
    par = _parities(x.c, x.d)
    table = _values_by_arity(x)
    out = LegGraphSum(x.c, x.d)
    for (p, key), v in y.terms.items():
        mo, mi = _arities(key)
        for w in range(key[0]):
            if trees and not all(valid_vertex(mo[u], mi[u], key[1][u]) for u in range(key[0]) if u != w):
                continue
            for value, u in table.get((mo[w], mi[w], key[1][w]), ()):
                for h, s, weight in _apply_value_at(key, w, value, par):
                    out.add_labelled(h, s * weight * u * v, p)
    return out


def der_bracket(x: LegGraphSum, y: LegGraphSum, max_legs=None) -> LegGraphSum:
    """[x, y] = (-1)^{|x||y|} y o x - x o y.

    This is the commutator of the right actions C . x . y, which is the
    convention under which F is a morphism of Lie algebras.  A term of
    y o x has the legs of the value of x it came from, so with
    ``max_legs`` only those values of the outer argument are used; the
    inner one must still be supplied to higher arity.
    """
    dx, dy = x.homogeneous_degree(), y.homogeneous_degree()
    if dx is None or dy is None:
        return LegGraphSum(x.c, x.d)
    sign = -1 if (dx * dy) % 2 else 1
    if max_legs is None:
        return act_der(y, x) * sign - act_der(x, y)
    return act_der(y, x.truncate(max_legs)) * sign - act_der(x, y.truncate(max_legs))


def generator_sum(c, d, max_legs, max_weight=None, coeff=lambda m, n, a: 1, unit=False) -> LegGraphSum:
    """sum coeff(m, n, a) hbar^a C_{m,n,a} over generators (and D with ``unit``)."""
    out = LegGraphSum(c, d)
    for m, n, a in _generators(max_legs, max_weight, unit):
        v = coeff(m, n, a)
        if v:
            out.add_labelled((1, (a,), (), (0,) * m, (0,) * n), Fraction(v), a)
    return out


def der_delta(x: LegGraphSum, theory: str = "plain", max_legs: int = None, hbar_order: int = None) -> LegGraphSum:
    """Differential of the derivation complex within truncation.

    It is the bracket with the properad differential extended by D: the
    first part applies the properad differential to the values of x
    (vertex splitting), the second evaluates x on the two-vertex trees of
    the differential of each generator, which attaches a new corolla to
    the values of x along a new edge.  Trees in which x sits on D and the
    other vertex is a generator are included.
    """
    if max_legs is None:
        raise DomainError("der_delta needs max_legs")
    diamond = theory == "diamond"
    if diamond and hbar_order is None:
        raise DomainError("the diamond theory needs hbar_order")
    if not diamond:
        hbar_order = 0
    c, d = x.c, x.d
    # a tree vertex joined by l parallel edges can have arity up to
    # max_legs - 1 + l, so values of x beyond max_legs are used too
    x = x.truncate(max_legs + hbar_order, hbar_order)
    deg = x.homogeneous_degree()
    if deg is None:
        return LegGraphSum(c, d)
    split = delta_diamond if diamond else delta_holieb
    ordinary = LegGraphSum(c, d, {k: v for k, v in x.terms.items() if k[1][0] != 0})
    out = split(ordinary.truncate(max_legs))
    trees = _plus_trees(c, d, max_legs, hbar_order if diamond else None, diamond)
    sign = 1 if deg % 2 else -1
    out = -out - act_der(ordinary, trees, trees=True) * sign
    # the pass-through value: attaching a corolla at its out-leg or in-leg
    for (p, key), v in x.terms.items():
        if key[0] == 0:
            out = out + generator_sum(c, d, max_legs, hbar_order if diamond else None, lambda m, n, a: n - m) * v
    return out.truncate(max_legs, hbar_order)


def _plus_trees(c, d, max_legs, max_weight, diamond):
    """Differentials of all generators and of D in the extended properad."""
    gens = generator_sum(c, d, max_legs, max_weight, unit=True)
    par = _parities(c, d)
    out = LegGraphSum(c, d)
    for (p, key), coeff in gens.terms.items():
        for g, s in _split_terms(key, 0, c, d, diamond, par, unit=True):
            out.add_labelled(g, s * coeff, p)
    return out


def der_delta_F(x: GraphSum, c, d, max_legs) -> LegGraphSum:
    """der_delta(F(x)) computed directly from the attachment description.

    Independent of the stored-value route: F(x) acts on the trees of the
    generators' differentials by attaching legs in all ways.
    """
    fx = map_F(x, c, d, max_legs)
    deg = fx.homogeneous_degree()
    if deg is None:
        return LegGraphSum(c, d)
    trees = _plus_trees(c, d, max_legs, None, False)
    sign = 1 if deg % 2 else -1
    return -delta_holieb(fx) - act_F(x, trees, trees=True) * sign


# ---------------------------------------------------------------------------
# hairy graphs and the factorisation F = G o Psi


def map_Psi(x: GraphSum, max_legs: int, c: int = 1, d: int = 1, reduce: bool = False) -> LegGraphSum:
    """Attach j = 1..max_legs out-legs in all ways (hairy graphs).

    With ``reduce`` the hairy zero rule (every vertex needs an outgoing edge
    or leg) is applied immediately; otherwise such terms are kept and die
    in map_G.
    """
    out = LegGraphSum(c, d)
    for tn, tedges, coeff in _gc_terms(x, c + d + 1):
        has_out = [False] * tn
        for t, h in tedges:
            has_out[t] = True
        for j in range(1, max_legs + 1):
            for counts in _compositions(j, tn):
                if reduce and not all(has_out[v] or counts[v] for v in range(tn)):
                    continue
                outs = tuple(v for v in range(tn) for _ in range(counts[v]))
                g = (tn, (0,) * tn, tedges, outs, ())
                out.add_labelled(g, coeff * _multinomial(counts))
    return out


def hairy_reduce(h: LegGraphSum) -> LegGraphSum:
    """Drop hairy graphs with a vertex that has no outgoing edge or leg."""

    def alive(key):
        mo, _ = _arities(key)
        return all(mo)

    return LegGraphSum(h.c, h.d, {k: v for k, v in h.terms.items() if alive(k[1])})


def _check_hairy(h: LegGraphSum):
    for (p, key) in h.terms:
        if key[4] or p or any(key[1]):
            raise DomainError("map_G expects hairy graphs: out-legs only, no weights")


def map_G(h: LegGraphSum, max_in_legs: int, max_legs: int = None) -> LegGraphSum:
    """Attach n = 1..max_in_legs in-legs in all ways, dropping invalid vertices."""
    _check_hairy(h)
    out = LegGraphSum(h.c, h.d)
    for (p, key), v in h.terms.items():
        tn, _, tedges, outs, _ = key
        m = len(outs)
        mo, mi = _arities(key)
        for n in range(1, max_in_legs + 1):
            if max_legs is not None and m + n > max_legs:
                break
            for counts in _compositions(n, tn):
                if not all(valid_vertex(mo[r], mi[r] + counts[r]) for r in range(tn)):
                    continue
                ins = tuple(r for r in range(tn) for _ in range(counts[r]))
                out.add_labelled((tn, (0,) * tn, tedges, outs, ins), v * _multinomial(counts))
    return out


def map_Psi_hbar(x, max_legs: int, c: int = 1, d: int = 1, reduce: bool = False) -> LegGraphSum:
    """hbar-linear extension of map_Psi; hbar^k x_k goes to power k."""
    if isinstance(x, GraphSum):
        x = HbarSeries(0, [x])
    out = LegGraphSum(c, d)
    for k, coeff_sum in enumerate(x.coefficients):
        for (p, key), v in map_Psi(coeff_sum, max_legs, c, d, reduce).terms.items():
            out._add((k, key), v)
    return out


def map_G_hbar(h: LegGraphSum, max_in_legs: int, max_weight: int, max_legs: int = None) -> LegGraphSum:
    """G_hbar(hbar^N h) = sum_k hbar^(N+k) (in-legs attached to h_k).

    h_k runs over the vertex weightings of total weight k; the exponent
    N + k is the weight of the generators on which the term is a value.
    """
    if (h.c + h.d) % 2:
        raise DomainError("the diamond theory needs c + d even")
    out = LegGraphSum(h.c, h.d)
    for (N, key), v in h.terms.items():
        if key[4] or any(key[1]):
            raise DomainError("map_G_hbar expects hairy graphs")
        tn, _, tedges, outs, _ = key
        m = len(outs)
        mo, mi = _arities(key)
        for k in range(0, max_weight - N + 1):
            for ws in _weightings(k, tn):
                for n in range(1, max_in_legs + 1):
                    if max_legs is not None and m + n > max_legs:
                        break
                    for counts in _compositions(n, tn):
                        if not all(valid_vertex(mo[r], mi[r] + counts[r], ws[r]) for r in range(tn)):
                            continue
                        ins = tuple(r for r in range(tn) for _ in range(counts[r]))
                        out.add_labelled((tn, tuple(ws), tedges, outs, ins), v * _multinomial(counts), N + k)
    return out


def hairy_class(max_legs: int, c: int = 1, d: int = 1) -> LegGraphSum:
    """sum_j (j-1) (one vertex with j out-legs), j <= max_legs."""
    out = LegGraphSum(c, d)
    for j in range(2, max_legs + 1):
        out.add_labelled((1, (0,), (), (0,) * j, ()), Fraction(j - 1))
    return out


# ---------------------------------------------------------------------------
# skeleton


def skeleton(lg: LegGraph) -> LegGraph:
    """Drop in-legs, prune valence-1 vertices recursively, smooth passing vertices.

    Valences count internal edges and out-legs.  A vertex is smoothed when
    the first two steps leave it with exactly one incoming edge and one
    outgoing edge or out-leg; an out-leg moves to the predecessor.  Vertices
    that were already of this form in the input (not valid corollas, so
    absent from honest Der graphs) are left alone.  The result has no
    in-legs and may have no vertices at all.
    """
    n = lg.vertex_count
    edges = list(lg.edges)
    outs = list(lg.out_legs) if n else []

    def shape(v, edges, outs, ins=()):
        e_in = sum(1 for t, h in edges if h == v)
        e_out = sum(1 for t, h in edges if t == v)
        return e_in, e_out, outs.count(v), list(ins).count(v)

    untouched = {v for v in range(1, n + 1) if shape(v, edges, outs, lg.in_legs) == (1, 1, 0, 0)}
    alive = set(range(1, n + 1))
    pruning = True
    while pruning:
        pruning = False
        for v in sorted(alive):
            e_in, e_out, o, _ = shape(v, edges, outs)
            if e_in + e_out + o <= 1:
                alive.discard(v)
                edges = [(t, h) for t, h in edges if v not in (t, h)]
                outs = [u for u in outs if u != v]
                pruning = True
    smoothing = True
    while smoothing:
        smoothing = False
        for v in sorted(alive - untouched):
            e_in, e_out, o, _ = shape(v, edges, outs)
            if e_in != 1 or e_out + o != 1:
                continue
            k_in = next(k for k, (t, h) in enumerate(edges) if h == v)
            src = edges[k_in][0]
            if e_out:
                k_out = next(k for k, (t, h) in enumerate(edges) if t == v)
                dst = edges[k_out][1]
                edges = [e for k, e in enumerate(edges) if k not in (k_in, k_out)] + [(src, dst)]
            else:
                edges = [e for k, e in enumerate(edges) if k != k_in]
                outs = [src if u == v else u for u in outs]
            alive.discard(v)
            smoothing = True
            break
    order = sorted(alive)
    rename = {v: i + 1 for i, v in enumerate(order)}
    return _hairy(len(order), tuple((rename[t], rename[h]) for t, h in edges), tuple(rename[u] for u in outs))


def _hairy(n, edges, outs):
    # built without the leg graph constructor so that the empty skeleton is allowed
    obj = object.__new__(LegGraph)
    for name, value in (("vertex_count", n), ("edges", edges), ("out_legs", outs), ("in_legs", ()), ("weights", (0,) * n)):
        object.__setattr__(obj, name, value)
    return obj


def skeleton_size(lg: LegGraph) -> int:
    return skeleton(lg).vertex_count


# ---------------------------------------------------------------------------
# distinguished derivations and the rescaling action


def make_special_der(name: str, c: int = 1, d: int = 1, max_legs: int = 6, max_weight: int = 0):
    """D1, T, or the rescaling exponents per generator."""
    if name == "D1":
        return generator_sum(c, d, max_legs, None, lambda m, n, a: m + n - 2)
    if name == "T":
        if (c + d) % 2:
            raise DomainError("T lives in the diamond theory (c + d even)")
        return generator_sum(c, d, max_legs, max_weight, lambda m, n, a: m + n + 2 * a - 2)
    if name == "pass_through":
        out = LegGraphSum(c, d)
        out.add_labelled(PASS_INTERNAL, Fraction(1))
        return out
    if name == "rescaling_exponents":
        return rescaling_exponents(max_legs, max_weight if max_weight else None)
    raise DomainError(f"unknown special derivation {name!r}")


def rescaling_exponents(max_legs: int, max_weight=None):
    """{(m, n, a): exponent}: m+n-2 for the plain theory, m+n+a-2 with weights."""
    if max_weight is None:
        return {(m, n, 0): m + n - 2 for m, n, _ in _generators(max_legs, unit=False)}
    return {(m, n, a): m + n + a - 2 for m, n, a in _generators(max_legs, max_weight, unit=False)}


def exponent_violations(diamond: bool, max_legs: int, max_weight: int = 0, exponent=None):
    """Output terms of the differential on generators that change the exponent.

    ``exponent(m, n, a)`` defaults to the rescaling exponents above.
    Returns a list of (generator, term) pairs; empty means conserved.
    """
    if exponent is None:
        exponent = (lambda m, n, a: m + n + a - 2) if diamond else (lambda m, n, a: m + n - 2)
    c, d = 1, 1
    bad = []
    for m, n, a in _generators(max_legs, max_weight if diamond else None, unit=False):
        gen = LegGraphSum(c, d)
        gen.add_labelled((1, (a,), (), (0,) * m, (0,) * n), Fraction(1), a)
        image = delta_diamond(gen) if diamond else delta_holieb(gen)
        for (p, key), v in image.terms.items():
            mo, mi = _arities(key)
            total = sum(exponent(mo[u], mi[u], key[1][u]) for u in range(key[0]))
            if total != exponent(m, n, a):
                bad.append(((m, n, a), LegGraph.from_internal(key)))
    return bad

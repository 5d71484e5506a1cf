"""Directed multigraphs with orientation signs.

A graph in one of the complexes is a directed multigraph together with an
orientation: an ordering of its edges when the dimension d is even, or of its
vertices when d is odd.  Reordering changes the element by the sign of the
permutation, so a graph with an automorphism acting by -1 is zero.

``canonicalize`` picks one labelled representative per isomorphism class and
returns the sign relating the input to it.  The search is colour refinement
followed by individualisation, exploring every leaf of the search tree; the
leaves with the smallest edge list differ from each other exactly by the
automorphisms of the graph, which is how zero graphs are detected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import product


class Parity(Enum):
    """Which cells carry the orientation: edges (even d) or vertices (odd d)."""

    EVEN = 0
    ODD = 1

    @classmethod
    def of_dimension(cls, d: int) -> "Parity":
        return cls.ODD if d % 2 else cls.EVEN


class GraphInputError(ValueError):
    """Raised for malformed graphs or graph literals."""


@dataclass(frozen=True)
class DiGraph:
    vertex_count: int
    edges: tuple

    def __post_init__(self):
        edges = tuple((int(t), int(h)) for t, h in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.vertex_count < 1:
            raise GraphInputError("a graph needs at least one vertex")
        for t, h in edges:
            if not (1 <= t <= self.vertex_count and 1 <= h <= self.vertex_count):
                raise GraphInputError(f"edge {t}>{h} leaves 1..{self.vertex_count}")
            if t == h:
                raise GraphInputError(f"self-loop at vertex {t}")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def out_degrees(self):
        deg = [0] * (self.vertex_count + 1)
        for t, _ in self.edges:
            deg[t] += 1
        return deg[1:]

    def in_degrees(self):
        deg = [0] * (self.vertex_count + 1)
        for _, h in self.edges:
            deg[h] += 1
        return deg[1:]

    def is_connected(self) -> bool:
        return _connected(self.vertex_count, [(t - 1, h - 1) for t, h in self.edges])

    def relabel(self, perm) -> "DiGraph":
        """Apply the vertex relabelling i -> perm[i-1] (1-indexed values)."""
        return DiGraph(self.vertex_count, tuple((perm[t - 1], perm[h - 1]) for t, h in self.edges))

    def literal(self) -> str:
        return "dg(%d;%s)" % (self.vertex_count, ",".join(f"{t}>{h}" for t, h in self.edges))

    def __str__(self):
        return self.literal()


_DG_RE = re.compile(r"^dg\((\d+);([0-9>,\s]*)\)$")


def parse_graph(text: str) -> DiGraph:
    """Parse ``dg(V;t>h,...)``; the written edge order is kept."""
    m = _DG_RE.match(text.strip())
    if not m:
        raise GraphInputError(f"not a graph literal: {text!r}")
    edges = []
    body = m.group(2).strip()
    if body:
        for item in body.split(","):
            parts = item.strip().split(">")
            if len(parts) != 2 or not all(p.strip().isdigit() for p in parts):
                raise GraphInputError(f"bad edge {item!r} in {text!r}")
            edges.append((int(parts[0]), int(parts[1])))
    return DiGraph(int(m.group(1)), tuple(edges))


@dataclass(frozen=True, order=True)
class CanonicalGraph:
    """A canonical representative; ordering is by (vertex count, edge list)."""

    vertex_count: int
    edges: tuple
    parity: Parity = field(compare=False)

    @property
    def key(self):
        return (self.vertex_count, self.edges)

    @property
    def graph(self) -> DiGraph:
        return DiGraph(self.vertex_count, self.edges)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def literal(self) -> str:
        return self.graph.literal()

    def __str__(self):
        return self.literal()


@dataclass(frozen=True)
class ConstraintSet:
    connected: bool = False
    acyclic: bool = False
    min_valence: int = 0
    forbid_passing: bool = False
    require_in_and_out: bool = False


DGC_CONSTRAINTS = ConstraintSet(connected=True, min_valence=2)
GCOR_CONSTRAINTS = ConstraintSet(connected=True, min_valence=2, acyclic=True, forbid_passing=True)


# ---------------------------------------------------------------------------
# permutations and small graph predicates


def perm_sign(perm) -> int:
    """Sign of a permutation given as a list of images of 0..n-1."""
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def sorting_sign(items) -> int:
    """Sign of the permutation that stably sorts ``items``."""
    order = sorted(range(len(items)), key=lambda i: items[i])
    return perm_sign(order)


def _connected(n, edges) -> bool:
    if n <= 1:
        return True
    adj = [[] for _ in range(n)]
    for t, h in edges:
        adj[t].append(h)
        adj[h].append(t)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def _acyclic(n, edges) -> bool:
    indeg = [0] * n
    succ = [[] for _ in range(n)]
    for t, h in edges:
        succ[t].append(h)
        indeg[h] += 1
    ready = [v for v in range(n) if indeg[v] == 0]
    done = 0
    while ready:
        v = ready.pop()
        done += 1
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return done == n


def _check(n, edges, c: ConstraintSet) -> bool:
    if c.min_valence or c.forbid_passing or c.require_in_and_out:
        ins = [0] * n
        outs = [0] * n
        for t, h in edges:
            outs[t] += 1
            ins[h] += 1
        for v in range(n):
            if ins[v] + outs[v] < c.min_valence:
                return False
            if c.forbid_passing and ins[v] == 1 and outs[v] == 1:
                return False
            if c.require_in_and_out and (ins[v] == 0 or outs[v] == 0):
                return False
    if c.connected and not _connected(n, edges):
        return False
    if c.acyclic and not _acyclic(n, edges):
        return False
    return True


def check_constraints(g: DiGraph, c: ConstraintSet) -> bool:
    return _check(g.vertex_count, [(t - 1, h - 1) for t, h in g.edges], c)


# ---------------------------------------------------------------------------
# canonical search


def _refine(colors, out_adj, in_adj):
    """Equitable refinement of an ordered colouring.

    Colours are small integers; the new colour of a vertex is the rank of its
    signature, which starts with the old colour, so the order of existing
    cells is preserved and cells are only split.
    """
    n = len(colors)
    count = len(set(colors))
    while True:
        sigs = [
            (
                colors[v],
                tuple(sorted((colors[w], m) for w, m in out_adj[v])),
                tuple(sorted((colors[w], m) for w, m in in_adj[v])),
            )
            for v in range(n)
        ]
        ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
        colors = [ranks[s] for s in sigs]
        if len(ranks) == count:
            return colors
        count = len(ranks)


def canonical_leaves(n, edges, initial=None):
    """Smallest relabelled edge list and all leaf relabellings attaining it.

    ``edges`` are 0-indexed pairs; ``initial`` optionally gives isomorphism
    invariant vertex colours.  Returns ``(key_edges, perms)`` where each perm
    maps an old vertex to its new position.
    """
    mult = {}
    for e in edges:
        mult[e] = mult.get(e, 0) + 1
    out_adj = [[] for _ in range(n)]
    in_adj = [[] for _ in range(n)]
    for (t, h), m in mult.items():
        out_adj[t].append((h, m))
        in_adj[h].append((t, m))
    if initial is None:
        initial = [0] * n
    else:
        ranks = {c: i for i, c in enumerate(sorted(set(initial)))}
        initial = [ranks[c] for c in initial]

    best = None
    winners = []

    def visit(colors):
        nonlocal best, winners
        colors = _refine(colors, out_adj, in_adj)
        if len(set(colors)) == n:
            key = tuple(sorted((colors[t], colors[h]) for t, h in edges))
            if best is None or key < best:
                best = key
                winners = [colors]
            elif key == best:
                winners.append(colors)
            return
        # first non-singleton cell in colour order
        sizes = {}
        for c in colors:
            sizes[c] = sizes.get(c, 0) + 1
        target = min(c for c, s in sizes.items() if s > 1)
        doubled = [2 * c + 1 for c in colors]
        for v in range(n):
            if colors[v] == target:
                branch = list(doubled)
                branch[v] = 2 * target
                visit(branch)

    visit(initial)
    return best, winners


@lru_cache(maxsize=1 << 20)
def _canonical_digraph(n, edges, parity):
    if parity is Parity.EVEN and len(set(edges)) < len(edges):
        # two parallel edges form an odd automorphism
        return None
    key, perms = canonical_leaves(n, edges)
    signs = set()
    for perm in perms:
        if parity is Parity.ODD:
            signs.add(perm_sign(perm))
        else:
            signs.add(sorting_sign([(perm[t], perm[h]) for t, h in edges]))
        if len(signs) > 1:
            return None
    return key, signs.pop()


def canonicalize(g: DiGraph, p: Parity):
    """Return ``(CanonicalGraph, sign)`` or ``None`` when g is zero."""
    edges = tuple((t - 1, h - 1) for t, h in g.edges)
    found = _canonical_digraph(g.vertex_count, edges, p)
    if found is None:
        return None
    key, sign = found
    return CanonicalGraph(g.vertex_count, tuple((t + 1, h + 1) for t, h in key), p), sign


def canonicalize_raw(n, edges, p: Parity):
    """Like ``canonicalize`` but on 0-indexed edge tuples; returns (key, sign)."""
    return _canonical_digraph(n, tuple(edges), p)


def undirected_key(n, pairs):
    """Isomorphism key of an undirected multigraph given by 0-indexed pairs."""
    sym = []
    for u, v in pairs:
        sym.append((u, v))
        sym.append((v, u))
    key, _ = canonical_leaves(n, sym)
    return key


# ---------------------------------------------------------------------------
# generation


def _degree_sequences(n, total, low):
    """Non-increasing sequences of n integers >= low summing to total."""

    def rec(prefix, remaining, slots, cap):
        if slots == 0:
            if remaining == 0:
                yield tuple(prefix)
            return
        hi = min(cap, remaining - low * (slots - 1))
        for x in range(hi, low - 1, -1):
            if x * slots < remaining:
                break
            yield from rec(prefix + [x], remaining - x, slots - 1, x)

    yield from rec([], total, n, total)


def _realizations(degrees):
    """All loopless multigraphs (as multiplicity dicts) with given degrees.

    Vertices of equal degree are interchangeable, so rows of such vertices
    are only required to be produced in some order; we keep it simple and
    enumerate all, deduplicating later by canonical form.
    """
    n = len(degrees)
    rem = list(degrees)
    pairs = {}

    def fill_row(i):
        if i == n:
            yield dict(pairs)
            return
        later = list(range(i + 1, n))
        need = rem[i]
        if need > sum(rem[j] for j in later):
            return

        def choose(k, need_left):
            if need_left == 0:
                yield from fill_row(i + 1)
                return
            if k == len(later):
                return
            j = later[k]
            if sum(rem[x] for x in later[k:]) < need_left:
                return
            for m in range(min(need_left, rem[j]), -1, -1):
                if m:
                    pairs[(i, j)] = m
                    rem[j] -= m
                yield from choose(k + 1, need_left - m)
                if m:
                    rem[j] += m
                    del pairs[(i, j)]

        saved = rem[i]
        rem[i] = 0
        yield from choose(0, need)
        rem[i] = saved

    yield from fill_row(0)


def undirected_classes(n, e, min_degree=0, connected=True):
    """One multiplicity dict per isomorphism class of loopless multigraphs."""
    seen = {}
    low = max(min_degree, 1 if (connected and n > 1) else 0)
    for degrees in _degree_sequences(n, 2 * e, low):
        for mult in _realizations(degrees):
            pairs = [p for p, m in mult.items() for _ in range(m)]
            if connected and not _connected(n, pairs):
                continue
            key = undirected_key(n, pairs)
            if key not in seen:
                seen[key] = mult
    return [seen[k] for k in sorted(seen)]


def _orientations(mult, acyclic):
    """Directed edge lists obtained by orienting each parallel bundle."""
    bundles = sorted(mult.items())
    choices = []
    for (u, v), m in bundles:
        options = [0, m] if acyclic else list(range(m + 1))
        choices.append(options)
    for pick in product(*choices):
        edges = []
        for ((u, v), m), forward in zip(bundles, pick):
            edges.extend([(u, v)] * forward)
            edges.extend([(v, u)] * (m - forward))
        yield edges


def enumerate_digraphs(n: int, e: int, c: ConstraintSet, p: Parity):
    """Sorted canonical representatives of the nonzero classes satisfying c."""
    if n < 1 or e < 0:
        return []
    found = {}
    directed_min = 0
    if c.require_in_and_out:
        directed_min = 2
    low = max(c.min_valence, directed_min)
    for mult in undirected_classes(n, e, low, c.connected):
        for edges in _orientations(mult, c.acyclic):
            if not _check(n, edges, c):
                continue
            res = _canonical_digraph(n, tuple(edges), p)
            if res is None:
                continue
            found.setdefault(res[0], True)
    return [CanonicalGraph(n, tuple((t + 1, h + 1) for t, h in key), p) for key in sorted(found)]

"""Acceptance criteria, one test per criterion.

Each test prints a line "PASS criterion n: ..." or "FAIL criterion n: ...";
the lines are repeated together at the end of the pytest run.  All checks
are exact.  Criterion 16 is split: the skeleton and the plain exponent
pass, the weighted exponent m+n+a-2 is not conserved and is reported as
FAIL (the conserved exponent m+n+2a-2 is reported alongside).
"""

import itertools
from fractions import Fraction

import pytest

from gcx import homology
from gcx import propcalc as pc
from gcx.gclib import (
    ComplexId,
    GraphSum,
    HbarSeries,
    bracket,
    differential,
    hbar_differential,
    loop_class,
    mc_residual,
    phi_hbar,
    single_edge,
    theta,
    upsilon4,
)
from gcx.graphcore import enumerate_digraphs
from gcx.homology import SliceKey, betti, lift, slice_basis
from gcx.verify import bracket_defect

GCOR2, GCOR3, DGC2 = ComplexId("GCor", 2), ComplexId("GCor", 3), ComplexId("dGC", 2)


@pytest.fixture(autouse=True, scope="module")
def no_disk_cache():
    homology.set_cache(None)


def B(cx, g, k):
    return betti(SliceKey(cx, g, k))


def three_vertex_graph(d):
    cx = ComplexId("GCor", d)
    found = [g for e in range(3, 6) for g in enumerate_digraphs(3, e, cx.constraints, cx.parity)]
    return GraphSum(cx.parity, {found[0]: 1}) if found else None


def samples(d):
    """single edge, theta_2 and a 3-vertex oriented graph, when nonzero."""
    out = [single_edge(d)]
    if not theta(2, d).is_zero():
        out.append(theta(2, d))
    g3 = three_vertex_graph(d)
    if g3 is not None:
        out.append(g3)
    return out


def at(x, m, n, a=None):
    return x.restrict(lambda p, mm, nn: (mm, nn) == (m, n) and (a is None or p == a))


def gen(m, n, c, d, a=0):
    out = pc.LegGraphSum(c, d)
    out.add_labelled((1, (a,), (), (0,) * m, (0,) * n), Fraction(1), a)
    return out


# ---------------------------------------------------------------------------


def test_c01_delta_squared(criterion):
    counts, bad = {}, []
    for cx, max_v, max_e in ((GCOR2, 5, 7), (GCOR3, 5, 7), (DGC2, 4, 5)):
        count = 0
        for n in range(1, max_v + 1):
            for e in range(0, max_e + 1):
                for g in enumerate_digraphs(n, e, cx.constraints, cx.parity):
                    count += 1
                    x = GraphSum(cx.parity, {g: 1})
                    if differential(differential(x, cx), cx):
                        bad.append((cx.slug, g.literal()))
        counts[cx.slug] = count
    ok = not bad
    criterion(1, ok, f"delta^2 = 0 on basis graphs {counts}" + (f"; failures {bad[:3]}" if bad else ""))
    assert ok


def test_c02_theta2_parity(criterion):
    ok = theta(2, 2).is_zero() and not theta(2, 3).is_zero()
    criterion(2, ok, "theta_2 = 0 for d = 2 and theta_2 != 0 for d = 3")
    assert ok


def test_c03_gcor3_degree_minus_one(criterion):
    vals = {g: B(GCOR3, g, -1) for g in (1, 2, 3)}
    ok = vals == {1: 1, 2: 0, 3: 0}
    criterion(3, ok, f"betti(GCor_3, g, k=-1) for g=1,2,3: {vals}")
    assert ok


def test_c04_gcor2_degree_one(criterion):
    vals = {g: B(GCOR2, g, 1) for g in (1, 2, 3)}
    u4 = upsilon4()
    closed = differential(u4, GCOR2).is_zero()
    in_slice = {(g.vertex_count, len(g.edges)) for g in u4.terms} == {(4, 5)}
    not_exact = lift(u4, SliceKey(GCOR2, 2, 0)) is None
    ok = vals == {1: 0, 2: 1, 3: 0} and closed and in_slice and not u4.is_zero() and not_exact
    criterion(4, ok, f"betti(GCor_2, g, k=1): {vals}; Upsilon4 nonzero, closed, not exact: {closed and not_exact}")
    assert ok


def test_c05_gcor2_degree_zero(criterion):
    vals = {g: B(GCOR2, g, 0) for g in (1, 2, 3)}
    ok = vals == {1: 0, 2: 0, 3: 0}
    criterion(5, ok, f"betti(GCor_2, g, k=0): {vals}")
    assert ok


def test_c06_gcor2_degree_two(criterion):
    key = SliceKey(GCOR2, 1, 2)
    vals = {1: betti(key), 2: B(GCOR2, 2, 2)}
    ok = vals == {1: 1, 2: 0} and (key.vertices, key.edges) == (4, 4)
    criterion(6, ok, f"betti(GCor_2, g, k=2): {vals}; g=1 slice has V=4, E=4")
    assert ok


def test_c07_upsilon6_lift(criterion):
    u4 = upsilon4()
    sq = bracket(u4, u4, 2)
    shape = {(g.vertex_count, len(g.edges)) for g in sq.terms}
    key = SliceKey(GCOR2, 4, 1)
    u6 = lift(sq * Fraction(-1, 2), key)
    ok = shape == {(7, 10)} and u6 is not None
    if ok:
        ok = (differential(u6, GCOR2) + sq * Fraction(1, 2)).is_zero()
        ok = ok and {(g.vertex_count, len(g.edges)) for g in u6.terms} == {(6, 9)}
    detail = f"[U4,U4] has {len(sq)} terms of shape {sorted(shape)}"
    detail += "; no lift" if u6 is None else f"; U6 with {len(u6)} terms, delta U6 + 1/2 [U4,U4] = 0"
    criterion(7, ok, detail)
    assert ok


def test_c08_maurer_cartan(criterion):
    mc = mc_residual(phi_hbar(4, 3), 3).is_zero()
    loop = hbar_differential(loop_class(4, 3), 4, 3).is_zero()
    ok = mc and loop
    criterion(8, ok, f"[phi_hbar, phi_hbar] = 0 through hbar^4: {mc}; loop class closed: {loop}")
    assert ok


def test_c09_F_of_single_edge(criterion):
    bad = []
    count = 0
    for c, d in ((1, 1), (0, 1)):
        fe = pc.map_F(single_edge(c + d + 1), c, d, 6)
        for m, n, a in pc._generators(6):
            x = gen(m, n, c, d)
            if (m, n) != (1, 1):
                count += 1
                if at(fe, m, n) != pc.delta_holieb(x):
                    bad.append(("F", c, d, m, n))
            if not pc.der_delta(pc.der_delta(x, max_legs=6), max_legs=6).is_zero():
                bad.append(("d2", c, d, m, n))
    ok = not bad
    criterion(9, ok, f"F(e) equals the Holieb differential on {count} generators, der_delta^2 = 0" + (f"; failures {bad[:4]}" if bad else ""))
    assert ok


def test_c10_F_diamond_of_phi(criterion):
    f = pc.map_F_diamond(phi_hbar(5, 3), 1, 1, 5, 5)
    bad, count = [], 0
    for m, n, a in pc._generators(5, 5, unit=False):
        if m + n + a <= 5:
            count += 1
            if at(f, m, n, a) != pc.delta_diamond(pc.LegGraphSum.of(pc.corolla(m, n, a), 1, 1, power=a)):
                bad.append((m, n, a))
    ok = not bad
    criterion(10, ok, f"F_diamond(phi_hbar) equals the diamond differential on {count} generators (m+n+a <= 5)")
    assert ok


def test_c11_F_chain_map_and_brackets(criterion):
    c, d, ml = 1, 1, 5
    pool = samples(3)
    chain_bad = []
    # the single edge is not an element of GCor; its bracket with everything
    # is covered by the bracket half below
    for g in pool[1:]:
        lhs = pc.map_F(differential(g, GCOR3), c, d, ml)
        if lhs != pc.der_delta(pc.map_F(g, c, d, ml), max_legs=ml):
            chain_bad.append(g)
    bracket_bad = []
    for i, j in itertools.product(range(len(pool)), repeat=2):
        if bracket_defect(pool[i], pool[j], c, d, ml):
            bracket_bad.append((i, j))
    ok = not chain_bad and not bracket_bad
    criterion(
        11,
        ok,
        f"F o delta = der_delta o F on {len(pool) - 1} graphs and F([a,b]) = [Fa, Fb] on {len(pool) ** 2} pairs (m+n <= 5;"
        " brackets with the single edge compared with der_delta)",
    )
    assert ok


def test_c12_factorization(criterion):
    bad, count = [], 0
    for c, d in ((1, 1), (0, 1)):
        for g in samples(c + d + 1):
            count += 1
            if pc.map_F(g, c, d, 5) != pc.map_G(pc.map_Psi(g, 5, c, d), 5, 5):
                bad.append(("F", c, d))
    for g in samples(3):
        for k in range(3):
            coeffs = [GraphSum(g.parity) for _ in range(3)]
            coeffs[k] = g
            x = HbarSeries(2, coeffs)
            count += 1
            if pc.map_F_diamond(x, 1, 1, 5, 2) != pc.map_G_hbar(pc.map_Psi_hbar(x, 5), 5, 2, 5):
                bad.append(("F_diamond", k))
    ok = not bad
    criterion(12, ok, f"F = G o Psi and F_diamond = G_hbar o Psi_hbar on {count} inputs (m+n <= 5, hbar <= 2)")
    assert ok


def test_c13_distinguished_classes(criterion):
    d1 = pc.der_delta(pc.make_special_der("D1", 1, 1, 6), max_legs=6).is_zero()
    t = pc.make_special_der("T", 1, 1, 8, 3)
    res = pc.der_delta(t, "diamond", max_legs=5, hbar_order=3).restrict(lambda p, m, n: m + n + p <= 5)
    ok = d1 and res.is_zero()
    criterion(13, ok, f"der_delta(D1) = 0 for m+n <= 6: {d1}; der_delta(T) = 0 for m+n+a <= 5, hbar <= 3: {res.is_zero()}")
    assert ok


def test_c14_dgc2_vs_gcor3(criterion):
    compared, mismatches, one_sided = [], [], []
    for g in (1, 2):
        for k in range(-3, 7):
            a, b = SliceKey(DGC2, g, k), SliceKey(GCOR3, g, k)
            if a.vertices > 7 or b.vertices > 8 or a.vertices < 1 or b.vertices < 1:
                continue
            na, nb = len(slice_basis(a)), len(slice_basis(b))
            if na and nb:
                ba, bb = betti(a), betti(b)
                compared.append((g, k, ba))
                if ba != bb:
                    mismatches.append((g, k, ba, bb))
            elif na or nb:
                one_sided.append((g, k, betti(a) if na else 0, betti(b) if nb else 0))
    ok = not mismatches and bool(compared)
    detail = f"agree on {len(compared)} (g, k) slices with both sides nonempty"
    nonzero = [(g, k, x) for g, k, x in compared if x]
    detail += f"; nonzero there: {nonzero}; one-sided slices with classes: {[s for s in one_sided if s[2] or s[3]]}"
    criterion(14, ok, detail)
    assert ok


@pytest.mark.slow
def test_c15_gcor3_degree_zero(criterion):
    vals = {g: B(GCOR3, g, 0) for g in (1, 2, 3)}
    ok = vals == {1: 0, 2: 0, 3: 1}
    criterion(15, ok, f"betti(GCor_3, g, k=0): {vals}")
    assert ok


def test_c16_skeleton_and_plain_rescaling(criterion):
    lg = pc.LegGraph(6, ((1, 2), (1, 3), (2, 4), (3, 4), (2, 6), (5, 6)), (4, 6), (1, 1, 5, 5))
    expected = pc._hairy(4, ((1, 2), (1, 3), (2, 4), (3, 4)), (4, 2))
    sk = pc.skeleton(lg)
    shape = pc.der_canonicalize(sk.internal(), 1, 1)[0] == pc.der_canonicalize(expected.internal(), 1, 1)[0]
    plain = pc.exponent_violations(False, 6)
    ok = shape and not plain
    criterion("16a", ok, f"skeleton of the worked example: {sk.literal()}; m+n-2 conserved by delta_holieb (m+n <= 6): {not plain}")
    assert ok


@pytest.mark.xfail(strict=True, reason="m+n+a-2 is not conserved by splittings with two or more parallel edges")
def test_c16_diamond_rescaling(criterion):
    bad = pc.exponent_violations(True, 5, 3)
    alt = pc.exponent_violations(True, 5, 3, exponent=lambda m, n, a: m + n + 2 * a - 2)
    ok = not bad
    example = f"; e.g. {bad[0][0]} -> {bad[0][1].literal()}" if bad else ""
    criterion(
        "16b",
        ok,
        f"m+n+a-2 conserved by delta_diamond (m+n <= 5, a <= 3): {len(bad)} violating terms{example};"
        f" m+n+2a-2 conserved: {not alt}",
    )
    assert ok

"""Named verification targets.

Each target runs one exact check and returns a Result: whether it passed,
a short description of what was checked, the truncation bounds used, and on
failure a witness term.  The command line tool prints these; the acceptance
suite exercises the same mathematics directly.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from dataclasses import dataclass, field

from .gclib import (
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
from .graphcore import enumerate_digraphs
from .homology import SliceKey, lift
from . import propcalc as pc


@dataclass
class Result:
    target: str
    passed: bool
    detail: str
    bounds: dict = field(default_factory=dict)
    witness: str = ""


def _first(x) -> str:
    """A printable first term of a nonzero GraphSum, HbarSeries or LegGraphSum."""
    if isinstance(x, HbarSeries):
        for k, a in enumerate(x.coefficients):
            if not a.is_zero():
                g, c = next(iter(a))
                return f"hbar^{k} {c} {g.literal()}"
        return ""
    if isinstance(x, pc.LegGraphSum):
        for p, lg, c in x:
            return f"hbar^{p} {c} {lg.literal()}"
        return ""
    for g, c in x:
        return f"{c} {g.literal()}"
    return ""


def _zero(target, x, detail, bounds):
    ok = x.is_zero()
    return Result(target, ok, detail, bounds, "" if ok else _first(x))


def sample_graphs(d: int, max_vertices: int = 4, per_size: int = 3):
    """A few oriented graphs of each small size, plus theta_2 when nonzero."""
    cx = ComplexId("GCor", d)
    out = []
    th = theta(2, d)
    if not th.is_zero():
        out.append(th)
    for n in range(3, max_vertices + 1):
        for e in range(n, 2 * n - 1):
            for g in enumerate_digraphs(n, e, cx.constraints, cx.parity)[:per_size]:
                out.append(GraphSum(cx.parity, {g: 1}))
    return out


def _edges(x: GraphSum) -> int:
    return max(len(g.edges) for g in x.terms)


# ---------------------------------------------------------------------------


def mc_phi_hbar(d=3, hbar_order=4, **_):
    x = mc_residual(phi_hbar(hbar_order, d), d)
    return _zero("mc:phi-hbar", x, "[phi_hbar, phi_hbar] = 0", {"d": d, "hbar_order": hbar_order})


def cocycle_theta2(d=3, **_):
    th = theta(2, d)
    if th.is_zero():
        return Result("cocycle:theta2", False, "theta_2 vanishes in this parity", {"d": d}, "theta_2 = 0")
    x = differential(th, ComplexId("GCor", d))
    return _zero("cocycle:theta2", x, "delta theta_2 = 0, theta_2 != 0", {"d": d})


def cocycle_upsilon4(**_):
    x = differential(upsilon4(), ComplexId("GCor", 2))
    return _zero("cocycle:upsilon4", x, "delta Upsilon_4 = 0 in GCor_2", {"d": 2})


def cocycle_loop_class(d=3, hbar_order=4, **_):
    x = hbar_differential(loop_class(hbar_order, d), hbar_order, d)
    return _zero("cocycle:loop-class", x, "[phi_hbar, sum (k-1) hbar^(k-2) theta_k] = 0", {"d": d, "hbar_order": hbar_order})


def cocycle_D1(c=1, d=1, max_legs=6, **_):
    x = pc.der_delta(pc.make_special_der("D1", c, d, max_legs), max_legs=max_legs)
    return _zero("cocycle:D1", x, "der_delta(D1) = 0", {"c": c, "d": d, "max_legs": max_legs})


def cocycle_T(c=1, d=1, max_total=5, hbar_order=3, **_):
    t = pc.make_special_der("T", c, d, max_total + hbar_order, hbar_order)
    x = pc.der_delta(t, "diamond", max_legs=max_total, hbar_order=hbar_order)
    x = x.restrict(lambda p, m, n: m + n + p <= max_total)
    return _zero("cocycle:T", x, "der_delta(T) = 0 for m+n+a <= max_total", {"c": c, "d": d, "max_total": max_total, "hbar_order": hbar_order})


def chainmap_F(c=1, d=1, max_legs=5, max_vertices=4, **_):
    D = c + d + 1
    cx = ComplexId("GCor", D)
    bounds = {"c": c, "d": d, "max_legs": max_legs, "max_vertices": max_vertices}
    samples = sample_graphs(D, max_vertices)
    for g in samples:
        diff = pc.map_F(differential(g, cx), c, d, max_legs) - pc.der_delta(pc.map_F(g, c, d, max_legs), max_legs=max_legs)
        if diff:
            return Result("chainmap:F", False, f"F(delta G) = der_delta(F(G)) failed for {_first(g)}", bounds, _first(diff))
    return Result("chainmap:F", True, f"F(delta G) = der_delta(F(G)) for {len(samples)} graphs", bounds)


def chainmap_F_diamond(max_legs=4, hbar_order=2, max_vertices=4, **_):
    c = d = 1
    cx = ComplexId("GCor", 3)
    bounds = {"c": c, "d": d, "max_legs": max_legs, "hbar_order": hbar_order, "max_vertices": max_vertices}
    samples = sample_graphs(3, max_vertices, per_size=2)
    count = 0
    for g in samples:
        for k in range(2):
            coeffs = [GraphSum(cx.parity) for _ in range(hbar_order + 1)]
            coeffs[k] = g
            x = HbarSeries(hbar_order, coeffs)
            lhs = pc.map_F_diamond(hbar_differential(x, hbar_order), c, d, max_legs, hbar_order)
            fx = pc.map_F_diamond(x, c, d, max_legs + hbar_order, hbar_order)
            diff = lhs - pc.der_delta(fx, "diamond", max_legs=max_legs, hbar_order=hbar_order)
            if diff:
                return Result("chainmap:F-diamond", False, f"failed for hbar^{k} {_first(g)}", bounds, _first(diff))
            count += 1
    return Result("chainmap:F-diamond", True, f"F_diamond(delta_hbar x) = der_delta(F_diamond(x)) for {count} series", bounds)


def bracket_defect(a: GraphSum, b: GraphSum, c: int, d: int, max_legs: int):
    """F([a, b]) - [F(a), F(b)] on arities m+n <= max_legs.

    The single edge acts through the full differential of the derivation
    complex (its image together with the terms of the extra (1,1)
    operation), so brackets with it are compared with der_delta.
    """
    D = c + d + 1
    lhs = pc.map_F(bracket(a, b, D), c, d, max_legs)
    e = single_edge(D)
    if a == e or b == e:
        other = b if a == e else a
        fo = pc.map_F(other, c, d, max_legs)
        rhs = pc.der_delta(fo, max_legs=max_legs)
        if a != e:
            # [x, e] = -(-1)^{|x|} [e, x]
            rhs = rhs * (1 if fo.homogeneous_degree() % 2 else -1)
        return lhs - rhs
    fa = pc.map_F(a, c, d, max_legs + _edges(b))
    fb = pc.map_F(b, c, d, max_legs + _edges(a))
    return lhs - pc.der_bracket(fa, fb, max_legs)


def bracketmap_F(c=1, d=1, max_legs=5, **_):
    D = c + d + 1
    cx = ComplexId("GCor", D)
    pool = [single_edge(D)]
    th = theta(2, D)
    if not th.is_zero():
        pool.append(th)
    three = [g for e in range(3, 6) for g in enumerate_digraphs(3, e, cx.constraints, cx.parity)]
    if three:
        pool.append(GraphSum(cx.parity, {three[0]: 1}))
    bounds = {"c": c, "d": d, "max_legs": max_legs}
    pairs = list(itertools.product(pool, repeat=2))
    for a, b in pairs:
        diff = bracket_defect(a, b, c, d, max_legs)
        if diff:
            return Result("bracketmap:F", False, f"F([a,b]) != [F a, F b] for {_first(a)}, {_first(b)}", bounds, _first(diff))
    return Result("bracketmap:F", True, f"F respects brackets on {len(pairs)} ordered pairs", bounds)


def factor_F(c=1, d=1, max_legs=5, hbar_order=2, max_vertices=4, **_):
    D = c + d + 1
    bounds = {"c": c, "d": d, "max_legs": max_legs, "hbar_order": hbar_order}
    samples = [single_edge(D)] + sample_graphs(D, max_vertices)
    for g in samples:
        diff = pc.map_F(g, c, d, max_legs) - pc.map_G(pc.map_Psi(g, max_legs, c, d), max_legs, max_legs)
        if diff:
            return Result("factor:F=G∘Psi", False, f"F != G Psi for {_first(g)}", bounds, _first(diff))
    if (c + d) % 2 == 0:
        cx = ComplexId("GCor", D)
        for g in samples:
            for k in range(hbar_order + 1):
                coeffs = [GraphSum(cx.parity) for _ in range(hbar_order + 1)]
                coeffs[k] = g
                x = HbarSeries(hbar_order, coeffs)
                lhs = pc.map_F_diamond(x, c, d, max_legs, hbar_order)
                rhs = pc.map_G_hbar(pc.map_Psi_hbar(x, max_legs, c, d), max_legs, hbar_order, max_legs)
                if lhs != rhs:
                    return Result("factor:F=G∘Psi", False, f"F_diamond != G_hbar Psi_hbar for hbar^{k} {_first(g)}", bounds, _first(lhs - rhs))
    return Result("factor:F=G∘Psi", True, f"factorisation holds on {len(samples)} graphs", bounds)


def d2_gcor(d=3, max_vertices=5, max_edges=7, **_):
    cx = ComplexId("GCor", d)
    bounds = {"d": d, "max_vertices": max_vertices, "max_edges": max_edges}
    count = 0
    for n in range(2, max_vertices + 1):
        for e in range(n - 1, max_edges + 1):
            for g in enumerate_digraphs(n, e, cx.constraints, cx.parity):
                x = differential(differential(GraphSum(cx.parity, {g: 1}), cx), cx)
                count += 1
                if x:
                    return Result("d2:gcor", False, f"delta^2 != 0 on {g.literal()}", bounds, _first(x))
    return Result("d2:gcor", True, f"delta^2 = 0 on {count} basis graphs", bounds)


def d2_holieb(max_legs=6, **_):
    bounds = {"max_legs": max_legs, "parities": "(1,1),(0,1),(1,0),(0,0)"}
    for c, d in ((1, 1), (0, 1), (1, 0), (0, 0)):
        for m, n, a in pc._generators(max_legs, unit=False):
            x = pc.delta_holieb(pc.delta_holieb(pc.LegGraphSum.of(pc.corolla(m, n), c, d)))
            if x:
                return Result("d2:holieb", False, f"delta^2 != 0 on C({m},{n}) for (c,d)=({c},{d})", bounds, _first(x))
    return Result("d2:holieb", True, "delta_H^2 = 0 on all generators", bounds)


def d2_holieb_diamond(max_total=5, **_):
    bounds = {"max_total": max_total, "parities": "(1,1),(0,0)"}
    for c, d in ((1, 1), (0, 0)):
        for m, n, a in pc._generators(max_total, max_total, unit=False):
            if m + n + a > max_total:
                continue
            x = pc.delta_diamond(pc.delta_diamond(pc.LegGraphSum.of(pc.corolla(m, n, a), c, d, power=a)))
            if x:
                return Result("d2:holieb-diamond", False, f"delta^2 != 0 on C({m},{n},{a})", bounds, _first(x))
    return Result("d2:holieb-diamond", True, "delta_diamond^2 = 0 on all generators", bounds)


def lift_upsilon6(**_):
    u4 = upsilon4()
    half_sq = bracket(u4, u4, 2) * Fraction(1, 2)
    key = SliceKey(ComplexId("GCor", 2), 4, 1)
    bounds = {"d": 2, "genus": 4, "degree": 1}
    u6 = lift(-half_sq, key)
    if u6 is None:
        return Result("lift:upsilon6", False, "-1/2 [U4, U4] is not exact in the slice", bounds, _first(half_sq))
    check = differential(u6, key.complex) + half_sq
    ok = check.is_zero()
    return Result("lift:upsilon6", ok, f"delta U6 + 1/2 [U4, U4] = 0 with U6 of {len(u6)} terms", bounds, "" if ok else _first(check))


TARGETS = {
    "mc:phi-hbar": mc_phi_hbar,
    "cocycle:theta2": cocycle_theta2,
    "cocycle:upsilon4": cocycle_upsilon4,
    "cocycle:loop-class": cocycle_loop_class,
    "cocycle:D1": cocycle_D1,
    "cocycle:T": cocycle_T,
    "chainmap:F": chainmap_F,
    "chainmap:F-diamond": chainmap_F_diamond,
    "bracketmap:F": bracketmap_F,
    "factor:F=G∘Psi": factor_F,
    "d2:gcor": d2_gcor,
    "d2:holieb": d2_holieb,
    "d2:holieb-diamond": d2_holieb_diamond,
    "lift:upsilon6": lift_upsilon6,
}

ALIASES = {"factor:F=G-Psi": "factor:F=G∘Psi", "factor:F=GoPsi": "factor:F=G∘Psi"}


def run(target: str, **params) -> Result:
    name = ALIASES.get(target, target)
    if name not in TARGETS:
        raise KeyError(target)
    return TARGETS[name](**params)

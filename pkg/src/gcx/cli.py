"""The ``gcx`` command.

Verbs: gen, delta, bracket, deg, betti, lift, skeleton, verify, cache.
Exit status is 0 on success, 1 when a verification fails (or a lift does
not exist) and 2 on malformed input.  With ``--machine`` every report is a
single JSON object with sorted keys.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import homology, propcalc, verify
from .gclib import (
    ComplexId,
    DomainError,
    HbarSeries,
    bracket,
    degree,
    differential,
    format_series,
    format_sum,
    genus,
    hbar_bracket,
    hbar_differential,
    make_special,
    parse_sum,
)
from .graphcore import GraphInputError, enumerate_digraphs

LEG_COMPLEXES = ("holieb", "holieb-diamond", "der", "der-diamond")


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _format(x) -> str:
    """Combination file text; the zero combination is a lone comment line."""
    if x.is_zero():
        return "# 0\n"
    if isinstance(x, HbarSeries):
        return format_series(x)
    if isinstance(x, propcalc.LegGraphSum):
        return propcalc.format_legsum(x)
    return format_sum(x)


def _terms(x) -> list:
    return [] if x.is_zero() else _format(x).splitlines()


def _report(args, data: dict, text: str) -> None:
    data = dict(data)
    data["conventions"] = homology.CONVENTIONS_VERSION
    if args.machine:
        print(json.dumps(data, sort_keys=True, default=str))
    else:
        sys.stdout.write(text if text.endswith("\n") or not text else text + "\n")


def _cx(args) -> ComplexId:
    return ComplexId(args.complex, args.d)


# ---------------------------------------------------------------------------
# verbs


def cmd_gen(args):
    if args.special:
        params = {"d": args.d}
        for key in ("k", "max_legs", "c"):
            if getattr(args, key) is not None:
                params[key] = getattr(args, key)
        if args.hbar_order is not None:
            params["N"] = args.hbar_order
        if args.special in ("D1", "T", "pass_through"):
            x = propcalc.make_special_der(
                args.special, args.c if args.c is not None else 1, args.d, args.max_legs or 6, args.hbar_order or 0
            )
        else:
            x = make_special(args.special, **params)
        bounds = {k: v for k, v in params.items() if k != "d"}
        _report(args, {"element": args.special, "d": args.d, "bounds": bounds, "terms": _terms(x)}, _format(x))
        return 0
    cx = _cx(args)
    if args.genus is not None and args.degree is not None:
        key = homology.SliceKey(cx, args.genus, args.degree)
        graphs = list(homology.slice_basis(key).graphs)
    elif args.vertices is not None and args.edges is not None:
        graphs = enumerate_digraphs(args.vertices, args.edges, cx.constraints, cx.parity)
    else:
        raise UsageError("gen needs --special, --genus/--degree or --vertices/--edges")
    text = "".join(f"1/1 {g.literal()}\n" for g in graphs)
    _report(args, {"complex": cx.slug, "count": len(graphs), "graphs": [g.literal() for g in graphs]}, text)
    return 0


def cmd_delta(args):
    text = _read(args.input)
    bounds = {}
    if args.complex in LEG_COMPLEXES:
        c = args.c if args.c is not None else 1
        x = propcalc.parse_legsum(text, c, args.d)
        if args.complex == "holieb":
            y = propcalc.delta_holieb(x)
        elif args.complex == "holieb-diamond":
            y = propcalc.delta_diamond(x)
        else:
            theory = "diamond" if args.complex == "der-diamond" else "plain"
            bounds = {"max_legs": args.max_legs, "hbar_order": args.hbar_order}
            y = propcalc.der_delta(x, theory, max_legs=args.max_legs, hbar_order=args.hbar_order)
        slug = f"{args.complex}(c={c},d={args.d})"
    else:
        cx = _cx(args)
        x = parse_sum(text, args.d)
        if isinstance(x, HbarSeries):
            n = args.hbar_order if args.hbar_order is not None else x.truncation_order
            bounds = {"hbar_order": n}
            y = hbar_differential(x.truncate(n), n, args.d)
        else:
            y = differential(x, cx)
        slug = cx.slug
    out = _format(y)
    _report(args, {"complex": slug, "bounds": bounds, "zero": y.is_zero(), "terms": _terms(y)}, out)
    return 0


def cmd_bracket(args):
    a = parse_sum(_read(args.a), args.d)
    b = parse_sum(_read(args.b), args.d)
    if isinstance(a, HbarSeries) or isinstance(b, HbarSeries):
        if not isinstance(a, HbarSeries):
            a = HbarSeries(0, [a])
        if not isinstance(b, HbarSeries):
            b = HbarSeries(0, [b])
        n = min(a.truncation_order, b.truncation_order)
        y = hbar_bracket(a.truncate(n), b.truncate(n), args.d)
    else:
        y = bracket(a, b, args.d)
    out = _format(y)
    _report(args, {"d": args.d, "zero": y.is_zero(), "terms": _terms(y)}, out)
    return 0


def cmd_deg(args):
    text = _read(args.input)
    if args.legs:
        c = args.c if args.c is not None else 1
        x = propcalc.parse_legsum(text, c, args.d)
        degs = sorted(x.degrees())
        _report(args, {"degrees": degs}, " ".join(map(str, degs)))
        return 0
    x = parse_sum(text, args.d)
    parts = x.coefficients if isinstance(x, HbarSeries) else [x]
    rows = sorted({(degree(g, args.d), genus(g)) for part in parts for g in part.terms})
    text = "".join(f"degree {k} genus {g}\n" for k, g in rows)
    _report(args, {"d": args.d, "slices": [{"degree": k, "genus": g} for k, g in rows]}, text)
    return 0


def cmd_betti(args):
    key = homology.SliceKey(_cx(args), args.genus, args.degree)
    b = homology.betti(key)
    bounds = {"genus": args.genus, "degree": args.degree, "vertices": key.vertices, "edges": key.edges}
    _report(args, {"complex": key.complex.slug, "bounds": bounds, "betti": b}, str(b))
    return 0


def cmd_lift(args):
    key = homology.SliceKey(_cx(args), args.genus, args.degree)
    target = parse_sum(_read(args.input), args.d)
    if isinstance(target, HbarSeries):
        raise UsageError("lift takes a plain combination")
    x = homology.lift(target, key)
    bounds = {"genus": args.genus, "degree": args.degree}
    if x is None:
        _report(args, {"complex": key.complex.slug, "bounds": bounds, "exists": False, "terms": []}, "no lift")
        return 1
    out = _format(x)
    _report(args, {"complex": key.complex.slug, "bounds": bounds, "exists": True, "terms": _terms(x)}, out)
    return 0


def cmd_skeleton(args):
    literal = args.graph if args.graph else _read(args.input).strip()
    sk = propcalc.skeleton(propcalc.parse_leggraph(literal))
    _report(args, {"input": literal, "skeleton": sk.literal()}, sk.literal())
    return 0


def cmd_verify(args):
    target = args.target
    if ":" not in target:
        if not args.element:
            raise UsageError("verify needs a target like mc:phi-hbar or a family with --element")
        target = f"{target}:{args.element}"
    params = {}
    for key in ("c", "d", "hbar_order", "max_legs", "max_vertices"):
        value = getattr(args, key)
        if value is not None:
            params[key] = value
    if verify.ALIASES.get(target, target) not in verify.TARGETS:
        raise UsageError(f"unknown verification target {target!r}; known: {', '.join(verify.TARGETS)}")
    result = verify.run(target, **params)
    verdict = "PASS" if result.passed else "FAIL"
    bounds = " ".join(f"{k}={v}" for k, v in sorted(result.bounds.items()))
    text = f"{verdict} {result.target}: {result.detail} [{bounds}]"
    if result.witness:
        text += f"\n  witness: {result.witness}"
    data = {
        "target": result.target,
        "passed": result.passed,
        "detail": result.detail,
        "bounds": result.bounds,
        "witness": result.witness,
    }
    _report(args, data, text)
    return 0 if result.passed else 1


def cmd_cache(args):
    cache = homology.get_cache()
    if args.action == "clear":
        cache.clear()
    _report(args, {"action": args.action, "root": str(cache.root)}, str(cache.root))
    return 0


# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--machine", action="store_true", default=argparse.SUPPRESS, help="emit JSON")
    common.add_argument("--cache", default=argparse.SUPPRESS, help="cache root (default $GCX_CACHE or ./cache)")

    p = argparse.ArgumentParser(prog="gcx", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, func, help):
        s = sub.add_parser(name, help=help, parents=[common])
        s.set_defaults(func=func)
        return s

    s = verb("gen", cmd_gen, "basis graphs of a slice or a named element")
    s.add_argument("--complex", default="gcor")
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--genus", type=int)
    s.add_argument("--degree", type=int)
    s.add_argument("--vertices", type=int)
    s.add_argument("--edges", type=int)
    s.add_argument("--special", help="single_edge, theta, phi_hbar, loop_class, upsilon4, hairy_class, D1, T, pass_through")
    s.add_argument("--k", type=int)
    s.add_argument("--c", type=int)
    s.add_argument("--hbar-order", type=int)
    s.add_argument("--max-legs", type=int)

    s = verb("delta", cmd_delta, "apply a differential to a combination file")
    s.add_argument("--complex", default="gcor", help="gcor, dgc, dfgc, " + ", ".join(LEG_COMPLEXES))
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--c", type=int)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--hbar-order", type=int)
    s.add_argument("--max-legs", type=int)

    s = verb("bracket", cmd_bracket, "bracket of two combination files")
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)

    s = verb("deg", cmd_deg, "degrees (and genera) present in a combination file")
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--c", type=int)
    s.add_argument("--legs", action="store_true", help="input is a leg graph combination")
    s.add_argument("--in", dest="input", required=True)

    s = verb("betti", cmd_betti, "Betti number of a (genus, degree) slice")
    s.add_argument("--complex", default="gcor")
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--genus", type=int, required=True)
    s.add_argument("--degree", type=int, required=True)

    s = verb("lift", cmd_lift, "solve delta x = target inside a slice")
    s.add_argument("--complex", default="gcor")
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--genus", type=int, required=True)
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--in", dest="input", required=True)

    s = verb("skeleton", cmd_skeleton, "skeleton of a leg graph")
    s.add_argument("graph", nargs="?")
    s.add_argument("--in", dest="input")

    s = verb("verify", cmd_verify, "run a named verification target")
    s.add_argument("target", help="e.g. mc:phi-hbar, or a family such as mc with --element")
    s.add_argument("--element")
    s.add_argument("--c", type=int)
    s.add_argument("--d", type=int)
    s.add_argument("--hbar-order", type=int)
    s.add_argument("--max-legs", type=int)
    s.add_argument("--max-vertices", type=int)

    s = verb("cache", cmd_cache, "show or clear the slice cache")
    s.add_argument("action", choices=["path", "clear"], nargs="?", default="path")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    args.machine = getattr(args, "machine", False)
    cache = getattr(args, "cache", None)
    homology.set_cache(homology.Cache(cache) if cache else homology.Cache.from_env())
    if args.verb in ("skeleton",) and not (args.graph or args.input):
        print("gcx: skeleton needs a leg graph or --in", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (UsageError, GraphInputError, DomainError, ValueError, OSError) as exc:
        print(f"gcx: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: ``jointreg <subcommand> ...``.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import re
import sys
from contextlib import nullcontext
from fractions import Fraction
from pathlib import Path

from .algebra import ParseError, parse_poly, split_tuple
from .heights import LogLinear, height_aff, sample_points
from .maps import (
    INF,
    MapFamily,
    ProjPoint,
    RationalMapP,
    compose,
    format_point,
    format_ratio,
    is_morphism,
    joint_regularity,
    load_family,
    parse_point,
    parse_ratio,
)
from . import dynamics, harness, picard

_DEFAULT_VARS = {2: ["x", "y"], 3: ["x", "y", "z"], 4: ["x", "y", "z", "w"]}


class UsageError(Exception):
    pass


# -- argument helpers -----------------------------------------------------------


def _variables(comps: list[str], given: str | None) -> list[str]:
    if given:
        names = [v.strip() for v in given.split(",")]
        if len(names) != len(comps):
            raise UsageError(f"--vars lists {len(names)} names for {len(comps)} components")
        return names
    names = _DEFAULT_VARS.get(len(comps)) or [f"x{i}" for i in range(len(comps))]
    idents = set(re.findall(r"[A-Za-z_]\w*", " ".join(comps)))
    upper = [v.upper() for v in names]
    if idents and idents <= set(upper):
        return upper
    return names


def parse_map(text: str, vars_opt: str | None = None) -> tuple[RationalMapP, list[str]]:
    comps = split_tuple(text)
    names = _variables(comps, vars_opt)
    return RationalMapP([parse_poly(c, names) for c in comps]), names


def _ratio_arg(text: str):
    try:
        return parse_ratio(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not a rational number or 'inf': {text!r}") from e


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from e


def _family(args) -> MapFamily:
    if getattr(args, "family", None):
        return load_family(args.family)
    maps = getattr(args, "map", None)
    if maps:
        parsed = [parse_map(m, args.vars) for m in maps]
        fam = MapFamily.from_projective([f for f, _ in parsed], variables=parsed[0][1][:-1])
        fam.hvar = parsed[0][1][-1]
        return fam
    raise UsageError("give --family PATH or --map")


def _resolve_r(args, family: MapFamily, out) -> tuple[object, str]:
    if getattr(args, "r", None) is not None:
        return args.r, "supplied on the command line"
    if family.k < 2:
        return INF, "single generator: coefficient 1"
    r, results = picard.family_dratio(family, args.degree_cap)
    for g, res in zip(family.generators, results):
        for note in res.notes:
            print(harness.discrepancy(f"{g.name}: D-ratio by computation", note, f"using {res}"), file=out)
    return r, "max of " + ", ".join(f"{g.name}: {res}" for g, res in zip(family.generators, results))


def _writer(path: str | None):
    return open(path, "w", newline="") if path else nullcontext(None)


# -- subcommands ----------------------------------------------------------------


def cmd_height(args, out) -> int:
    text = args.point.strip()
    if text.startswith("[") and ":" in text:
        P = ProjPoint.of([Fraction(t) for t in text.strip("[]").split(":")])
        M = P.magnitude()
        print(f"point {P}", file=out)
    else:
        P = parse_point(text)
        M = height_aff(P).magnitude
        print(f"point {format_point(P)}", file=out)
    print(f"M = {M}", file=out)
    print(f"h = log({M}) = {LogLinear.log(M).decimal()}", file=out)
    return 0


def cmd_eval(args, out) -> int:
    fam = _family(args)
    P = parse_point(args.point)
    x = [Fraction(t) for t in P]
    for g in fam.generators:
        if len(x) == fam.n:
            img = g.map.evaluate(ProjPoint.of(x + [1]))
        elif len(x) == fam.n + 1:
            img = g.map.evaluate(ProjPoint.of(x))
        else:
            raise ValueError(f"point has {len(x)} coordinates, expected {fam.n} (affine) or {fam.n + 1}")
        if img is None:
            print(f"{g.name}: indeterminate", file=out)
        elif img.coords[-1] != 0:
            print(f"{g.name}: {format_point(img.to_affine())}  [{img}]  M = {img.magnitude()}", file=out)
        else:
            print(f"{g.name}: {img} (at infinity)  M = {img.magnitude()}", file=out)
    return 0


def cmd_compose(args, out) -> int:
    if len(args.map) < 2:
        raise UsageError("compose needs at least two --map options (applied right to left)")
    maps = [parse_map(m, args.vars) for m in args.map]
    names = maps[0][1]
    h = maps[-1][0]
    for f, _ in reversed(maps[:-1]):
        h = compose(f, h)
    print("[" + " : ".join(h.to_strings(names)) + "]", file=out)
    print(f"degree {h.degree}", file=out)
    return 0


def cmd_check_regular(args, out) -> int:
    fam = _family(args)
    v = joint_regularity(fam.maps, args.degree_cap)
    for g in fam.generators:
        print(f"{g.name}: degree {g.degree}, Z(f): {is_morphism(g.map, args.degree_cap)}", file=out)
    print(f"joint verdict: {v}", file=out)
    if args.expect_regular and not v.is_empty:
        print(harness.discrepancy("family is jointly regular", str(v), "reported; later steps use the weaker form"), file=out)
    return 0


def cmd_resolve(args, out) -> int:
    f, names = parse_map(args.map, args.vars)
    if args.script:
        script = picard.BlowupScript.loads(Path(args.script).read_text())
        rs = picard.resolve_scripted(f, script)
    else:
        rs = picard.resolve_toric(f, args.max_steps)
    print(rs.report(names), file=out)
    if args.script_out:
        Path(args.script_out).write_text(json.dumps(rs.script.to_json(), indent=2) + "\n")
    return 0


def cmd_dratio(args, out) -> int:
    if args.map and not args.family and len(args.map) == 1:
        f, _ = parse_map(args.map[0], args.vars)
        res = picard.dratio(f, args.degree_cap)
        print(f"r = {format_ratio(res.value)}  [{res.provenance}]", file=out)
        if res.resolved is not None:
            rs = res.resolved
            print(f"pi*H (proper) = {rs.pi_star_h}", file=out)
            print(f"phi*H (proper) = {rs.phi_star_h}", file=out)
        return 0
    fam = _family(args)
    r, results = picard.family_dratio(fam, args.degree_cap)
    for g, res in zip(fam.generators, results):
        print(f"{g.name}: r = {format_ratio(res.value)}  [{res.provenance}]", file=out)
        for note in res.notes:
            print(harness.discrepancy(f"{g.name}: computed D-ratio route", note, f"using {res.provenance}"), file=out)
    print(f"r = max = {format_ratio(r)}", file=out)
    return 0


def cmd_delta(args, out) -> int:
    fam = _family(args)
    r, prov = _resolve_r(args, fam, out)
    print("generator  degree  1/degree", file=out)
    for g in fam.generators:
        print(f"{g.name:<10} {g.degree:>6}  {Fraction(1, g.degree)}", file=out)
    print(f"r = {format_ratio(r)}  [{prov}]", file=out)
    d = picard.delta(fam, r)
    print(f"delta = {d}", file=out)
    print(f"delta < 1: {d < 1}", file=out)
    return 0


def cmd_verify(args, out) -> int:
    fam = _family(args)
    r, prov = _resolve_r(args, fam, out)
    pts, spec = harness.seeded_samples(fam.n, args.seed, args.samples, args.m_min, args.m_max)
    rep = harness.verify_inequality(
        fam,
        r,
        pts,
        r_provenance=prov,
        family_id=args.family or "command line",
        sample_spec=spec,
        workers=args.workers,
        override_regularity=args.override,
        keep_rows=bool(args.out),
    )
    print(rep.format(), file=out)
    with _writer(args.out) as fh:
        if fh:
            rep.write_csv(fh)
    return 0


def cmd_kappa(args, out) -> int:
    fam = _family(args)
    ladder = [int(x) for x in args.ladder.split(",")]
    trace = harness.kappa_estimate(fam, ladder, args.samples, args.seed, args.workers)
    print("band                 count  min ratio", file=out)
    for b in trace:
        print(f"{b.label:<20} {b.count:>5}  {b.render()}", file=out)
    if args.expect is not None:
        bad = [b for b in trace if b.lo >= args.expect_from and b.min_ratio < float(args.expect)]
        if bad:
            print(
                harness.discrepancy(
                    f"kappa trace >= {args.expect} for magnitudes >= {args.expect_from}",
                    ", ".join(f"{b.label}: {b.render()}" for b in bad),
                    "reported only",
                ),
                file=out,
            )
    with _writer(args.out) as fh:
        if fh:
            harness.write_kappa_csv(fh, trace)
    return 0


def cmd_northcott(args, out) -> int:
    if args.map:
        f, _ = parse_map(args.map[0], args.vars)
    else:
        f = _family(args).generators[0].map
    n = f.n
    pts = sample_points(n, args.m_min, args.m_max, args.samples, args.seed)
    rep = harness.northcott_check(f, pts, args.degree_cap)
    print(rep.format(), file=out)
    return 0


def cmd_orbit(args, out) -> int:
    fam = _family(args)
    rec = dynamics.orbit_explore(fam, parse_point(args.point), args.size_cap, args.magnitude_cap)
    print(f"start {format_point(rec.start)}", file=out)
    print(f"verdict {rec.status}", file=out)
    print(f"orbit size {rec.size}", file=out)
    print(f"max magnitude {rec.max_magnitude.magnitude}", file=out)
    if rec.is_finite:
        for Q in sorted(rec.visited, key=lambda q: (height_aff(q).magnitude, q)):
            print(f"  {format_point(Q)}", file=out)
    return 0


def cmd_find_preperiodic(args, out) -> int:
    fam = _family(args)
    r, prov = _resolve_r(args, fam, out)
    res = dynamics.preperiodic_search(
        fam, r, args.c_est, args.margin, args.size_cap, args.magnitude_cap, workers=args.workers
    )
    buf = io.StringIO()
    dynamics.write_search_csv(buf, res)
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    print(f"# r = {format_ratio(r)} [{prov}]", file=sys.stderr)
    print(
        f"# delta = {res.delta}, C_est = {res.c_est}, margin = {res.margin}, bound M(P) <= {res.magnitude_bound}, "
        f"examined {res.examined}, finite {len(res.finite)}, inconclusive {len(res.capped)}",
        file=sys.stderr,
    )
    out.write(buf.getvalue())
    return 0


def cmd_telescope(args, out) -> int:
    fam = _family(args)
    r, prov = _resolve_r(args, fam, out)
    C = LogLinear.log(args.c_log) if args.c_log is not None else LogLinear()
    res = dynamics.telescoping_verify(fam, r, parse_point(args.point), args.depth, C)
    print(f"r = {format_ratio(r)} [{prov}], rho = {res.rho}, depth {res.depth}, words {res.words_used}", file=out)
    print(f"direct sum  = {res.direct.decimal()}", file=out)
    print(f"telescoped  = {res.closed.decimal()}", file=out)
    print(f"exact agreement: {res.agrees}", file=out)
    print(f"margin sign: {res.sign}", file=out)
    return 0


# -- parser ---------------------------------------------------------------------


def _add_common(p, family=True, maps=True, sampling=False):
    if family:
        p.add_argument("--family", metavar="PATH", help="family JSON file")
    if maps:
        p.add_argument("--map", action="append", help='map as "[X^2 : Y*Z : Z^2]" (repeatable)')
        p.add_argument("--vars", help="comma-separated projective variable names")
    p.add_argument("--degree-cap", type=int, default=None, help="saturation degree cap")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", metavar="PATH", help="CSV output")
    if sampling:
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=10_000)
        p.add_argument("--m-min", type=int, default=10)
        p.add_argument("--m-max", type=int, default=10_000)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jointreg", description="Heights, joint regularity and D-ratios of rational maps.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("height", help="height of a point")
    p.add_argument("point", help='affine "(1/2, 3)" or projective "[1:2:3]"')
    p.set_defaults(func=cmd_height)

    p = sub.add_parser("eval", help="evaluate the generators at a point")
    _add_common(p)
    p.add_argument("--point", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compose", help="compose maps (last --map applied first)")
    _add_common(p, family=False)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("check-regular", help="joint regularity verdict")
    _add_common(p)
    p.add_argument("--expect-regular", action="store_true", help="print a DISCREPANCY block if not regular")
    p.set_defaults(func=cmd_check_regular)

    p = sub.add_parser("resolve", help="resolve a map of P^2 by point blowups")
    p.add_argument("--map", required=True)
    p.add_argument("--vars")
    p.add_argument("--script", metavar="PATH", help="blowup script JSON (default: toric resolution)")
    p.add_argument("--script-out", metavar="PATH")
    p.add_argument("--max-steps", type=int, default=64)
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("dratio", help="D-ratio of a map or of every generator")
    _add_common(p)
    p.set_defaults(func=cmd_dratio)

    p = sub.add_parser("delta", help="delta of a family")
    _add_common(p)
    p.add_argument("--r", type=_ratio_arg)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("verify", help="fit the constant of the height inequality")
    _add_common(p, sampling=True)
    p.add_argument("--r", type=_ratio_arg)
    p.add_argument("--override", action="store_true", help="run even without a regularity certificate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("kappa", help="per-band minimum of sum h(f_l P)/d_l / h(P)")
    _add_common(p, sampling=True)
    p.set_defaults(samples=harness.DEFAULT_PER_BAND)
    p.add_argument("--ladder", default=",".join(str(x) for x in harness.DEFAULT_LADDER))
    p.add_argument("--expect", type=_fraction_arg, help="report a DISCREPANCY when a band falls below this")
    p.add_argument("--expect-from", type=int, default=1000)
    p.set_defaults(func=cmd_kappa)

    p = sub.add_parser("northcott", help="fit C1, C2 for a morphism")
    _add_common(p, sampling=True)
    p.set_defaults(func=cmd_northcott)

    p = sub.add_parser("orbit", help="explore the monoid orbit of a point")
    _add_common(p, maps=False)
    p.add_argument("--point", required=True)
    p.add_argument("--size-cap", type=int, default=1000)
    p.add_argument("--magnitude-cap", type=int, default=10**12)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("find-preperiodic", help="search all points of bounded height")
    _add_common(p, maps=False)
    p.add_argument("--r", type=_ratio_arg)
    p.add_argument("--c-est", type=_fraction_arg, default=Fraction(0))
    p.add_argument("--margin", type=_fraction_arg, default=Fraction(0))
    p.add_argument("--size-cap", type=int, default=1000)
    p.add_argument("--magnitude-cap", type=int, default=10**12)
    p.set_defaults(func=cmd_find_preperiodic)

    p = sub.add_parser("telescope", help="evaluate the telescoped inequality at a point")
    _add_common(p, maps=False)
    p.add_argument("--point", required=True)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--r", type=_ratio_arg)
    p.add_argument("--c-log", type=_fraction_arg, help="use C = log(Q)")
    p.set_defaults(func=cmd_telescope)
    return ap


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args, out)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except (ParseError, ValueError, ArithmeticError, OSError, KeyError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


run_cli = main

if __name__ == "__main__":
    sys.exit(main())

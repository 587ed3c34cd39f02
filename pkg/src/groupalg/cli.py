"""Command-line workbench.

Exit codes: 0 success, 1 a check was violated, 2 bad input or a failed
precondition, 3 a resource cap was hit (ball size, truncation tail).
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import algebra as alg
from .ball import (
    DEFAULT_CAP,
    BallCapExceeded,
    CacheCorrupt,
    OutOfBall,
    cached_ball,
    count_spheres,
    exact_length,
    growth_csv,
)
from .bw import BWConfig, BWEvaluator, TailNotNegligible, bw_report, verify_comparison
from .config import DEFAULT_SEED, ConfigError, ExperimentConfig
from .diagnostics import (
    DEFAULT_GRID,
    complete_growth_tail,
    gp_verdict,
    minimal_R,
    series_csv,
    surface_vs_volume,
)
from .groups import FamilyMismatch, parse_group, with_generators
from .growth import (
    check_submultiplicative,
    growth_class,
    parse_growth,
    search_witness,
    symbolic_compare,
)
from .logvalue import EQ_TOL
from .norms import (
    CheckReport,
    NormSpec,
    PreconditionError,
    check_bimodule_estimate,
    check_coproduct_identity,
    check_product_inequality,
    check_schauder_identity,
    norm,
    set_tolerance,
    weighted_l1,
)
from .verify import run_all

logger = logging.getLogger("groupalg")

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False, default=_default) + "\n"


def _default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _clean(obj):
    """Replace non-finite floats with strings so the JSON stays strict."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    return obj


def _emit(args, obj) -> None:
    text = _dump(_clean(obj))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _write_csv(path, text: str) -> None:
    if path:
        Path(path).write_text(text)


def _group(args):
    spec = parse_group(args.group)
    if getattr(args, "generators", None):
        spec = with_generators(spec, args.generators.split(","))
    return spec


def _table_for(args, spec, elements):
    """Smallest length table covering the supports of ``elements`` (at least --radius)."""
    L = exact_length(spec)
    if L is not None:
        radius = max((L(g) for a in elements for g in a.coeffs), default=0)
    else:
        radius = 0
        while True:
            t = cached_ball(spec, radius, args.cache_dir, args.ball_cap)
            if all(g in t for a in elements for g in a.coeffs):
                break
            radius += 1
    if getattr(args, "radius", None) is not None:
        radius = max(radius, args.radius)
    return cached_ball(spec, radius, args.cache_dir, args.ball_cap)


def _load(spec, path):
    return alg.loads_element(spec, Path(path).read_text())


def _caps(args):
    return tuple(args.caps) if args.caps else (8, 8)


# subcommands

def cmd_ball(args) -> int:
    spec = _group(args)
    if args.counts_only:
        counts = count_spheres(spec, args.N, args.ball_cap)
    else:
        counts = cached_ball(spec, args.N, args.cache_dir, args.ball_cap).counts
    text = growth_csv(counts)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_growth(args) -> int:
    sigma = parse_growth(args.sigma)
    out = {"sigma": str(sigma), "growth_class": _class_label(growth_class(sigma))}
    code = EXIT_OK
    if args.check_submult is not None:
        v = check_submultiplicative(sigma, args.check_submult)
        out["submultiplicative"] = {
            "holds": v.holds,
            "checked_range": v.checked_range,
            "counterexample": list(v.counterexample) if v.counterexample else None,
        }
        if not v.holds:
            code = EXIT_VIOLATION
    if args.other:
        other = parse_growth(args.other)
        c_max, k_max = _caps(args)
        fwd = search_witness(sigma, other, c_max, k_max, args.range)
        back = search_witness(other, sigma, c_max, k_max, args.range)
        sym = symbolic_compare(sigma, other)
        if sym == "unknown":
            sym = {(True, True): "equivalent", (True, False): "precedes", (False, True): "succeeds"}.get(
                (fwd is not None, back is not None), "unknown"
            )
        out.update(
            {
                "other": str(other),
                "verdict": sym,
                "witness": None if fwd is None else {"c": fwd.c, "k": fwd.k},
                "reverse_witness": None if back is None else {"c": back.c, "k": back.k},
                "caps": [c_max, k_max],
                "checked_range": args.range,
                "note": "witnesses are exhaustive checks on 0..checked_range only",
            }
        )
    _emit(args, out)
    return code


def _class_label(key) -> str | None:
    if key is None:
        return None
    tier, theta, fact = key
    if tier == 0:
        return "polynomial"
    return f"{'subfact' if fact else 'subexp'}({theta:g})"


def _norm_spec(args, table) -> NormSpec:
    return NormSpec(parse_growth(args.sigma), args.R, table, args.p)


def cmd_norm(args) -> int:
    spec = _group(args)
    elements = [_load(spec, p) for p in args.elements]
    table = _table_for(args, spec, elements)
    ns = _norm_spec(args, table)
    rows = []
    rep = CheckReport("schauder")
    for path, a in zip(args.elements, elements):
        v = norm(a, ns)
        if ns.p == 1:
            check_schauder_identity(a, ns, rep)
        rows.append({"file": Path(path).name, "log_norm": v.log, "norm": v.value})
    out = {"sigma": args.sigma, "R": args.R, "p": args.p, "values": rows}
    if ns.p == 1:
        out["schauder"] = rep.summary()
    _emit(args, out)
    return EXIT_OK if rep.holds else EXIT_VIOLATION


def cmd_conv(args) -> int:
    spec = _group(args)
    a, b = _load(spec, args.a), _load(spec, args.b)
    ab = alg.convolve(a, b)
    table = _table_for(args, spec, [a, b, ab])
    if args.product:
        Path(args.product).write_text(alg.dumps_element(ab))
    sigma = parse_growth(args.sigma)
    out = {"support": len(ab), "log_norm": weighted_l1(ab, sigma, args.R, table).log}
    rep = None
    if args.check_submult:
        rep = check_product_inequality(a, b, sigma, args.R, table)
    elif args.eps is not None:
        rep = check_product_inequality(a, b, sigma, args.R, table, eps=args.eps)
    if rep is not None:
        out["check"] = rep.summary()
    _emit(args, out)
    return EXIT_VIOLATION if rep is not None and not rep.holds else EXIT_OK


def cmd_hopf(args) -> int:
    spec = _group(args)
    a = _load(spec, args.a)
    elements = [a]
    b = _load(spec, args.bimodule) if args.bimodule else None
    if b is not None:
        elements.append(b)
        elements += [alg.convolve(a, b), alg.convolve(b, a)]
    table = _table_for(args, spec, elements)
    sigma = parse_growth(args.sigma)
    ca = alg.counit(a)
    tr = alg.trace(a)
    out = {
        "counit": [ca.real, ca.imag],
        "trace": [tr.real, tr.imag],
        "star": alg.dumps_element(alg.star(a)).splitlines(),
        "antipode": alg.dumps_element(alg.antipode(a)).splitlines(),
    }
    reports = []
    if args.check_coproduct:
        reports.append(check_coproduct_identity(a, sigma, args.R, table))
    if b is not None:
        reports.append(check_bimodule_estimate(a, b, sigma, args.R, table, eps=args.eps))
    out["checks"] = [r.summary() for r in reports]
    _emit(args, out)
    return EXIT_OK if all(r.holds for r in reports) else EXIT_VIOLATION


def _grid(text, default=DEFAULT_GRID):
    if not text:
        return list(default)
    return [float(x) for x in text.split(",")]


def cmd_nuclearity(args) -> int:
    spec = _group(args)
    counts = count_spheres(spec, args.N, args.ball_cap)
    sigma = parse_growth(args.sigma)
    rep = gp_verdict(counts, sigma, _grid(args.rho_grid), args.N, args.delta)
    out = rep.to_json()
    c_max, k_max = _caps(args)
    out["volume_surface"] = surface_vs_volume(counts, sigma, c_max, k_max).to_json()
    _write_csv(args.csv, series_csv(rep))
    _emit(args, out)
    return EXIT_VIOLATION if rep.contradicts else EXIT_OK


def cmd_complete_growth(args) -> int:
    spec = _group(args)
    counts = count_spheres(spec, args.N, args.ball_cap)
    sigma = parse_growth(args.sigma)
    rep = complete_growth_tail(counts, sigma, args.R, args.z, args.N, args.delta)
    out = rep.to_json()
    out["T_N"] = rep.total
    mr = minimal_R(counts, sigma, args.z, _grid(args.R_grid), args.delta)
    out["minimal_R"] = mr.R
    out["minimal_R_monotone"] = mr.monotone
    _write_csv(args.csv, series_csv(rep))
    _emit(args, out)
    return EXIT_OK


def cmd_bw(args) -> int:
    spec = _group(args)
    a = _load(spec, args.element)
    k = spec.parse(args.k) if args.k else None
    table = _table_for(args, spec, [a] + ([alg.AlgebraElement.basis(spec, k)] if k is not None else []))
    if args.radius is None:
        want = _default_bw_radius(spec)
        if table.radius < want:
            table = cached_ball(spec, want, args.cache_dir, args.ball_cap)
    cfg = BWConfig(args.rho, args.m, args.ell, k, table.radius, args.tail_fraction)
    ev = BWEvaluator(table, args.rho, args.tail_fraction)
    if k is not None:
        ks = [k]
    else:
        ks = [g for g in table.elements if table.length(g) <= args.k_radius]
    out = bw_report(a, cfg, table, ks, ev)
    if args.fit:
        cmp = verify_comparison(table, args.rho, args.m, args.eps, args.R, seed=args.seed, evaluator=ev)
        out["fitted_constants"] = cmp["fitted_constants"]
        out["pointwise"] = cmp["pointwise"]
    out["tail_fraction_limit"] = args.tail_fraction
    worst = max(out["tail_bounds"], default=0.0)
    _emit(args, out)
    if worst > args.tail_fraction:
        raise TailNotNegligible(worst, args.tail_fraction)
    if args.fit and not out["pointwise"]["holds"]:
        return EXIT_VIOLATION
    return EXIT_OK


def _default_bw_radius(spec) -> int:
    """Truncation radius keeping the ball near a few thousand elements."""
    kind, degree = spec.growth_class()
    if kind == "bounded":
        return 30
    if kind == "poly" and degree <= 2:
        return 30 if degree == 1 else 20
    return 8 if kind == "poly" else 6


def cmd_verify_all(args) -> int:
    report = run_all(args.seed, quick=args.quick)
    _emit(args, report)
    return EXIT_OK if report["ok"] else EXIT_VIOLATION


# argument parsing

def _caps_arg(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("caps are written c_max,k_max")
    return [int(p) for p in parts]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="groupalg", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON experiment config instead of subcommand flags")
    p.add_argument("--cache-dir", default=None, help="directory for cached length tables")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--tolerance", type=float, default=EQ_TOL, help="relative slack for equality checks")
    p.add_argument("--caps", type=_caps_arg, default=None, help="witness search caps c_max,k_max (default 8,8)")
    p.add_argument("--ball-cap", type=int, default=DEFAULT_CAP, help="maximum number of ball elements")
    p.add_argument("-o", "--output", default=None, help="write the report here instead of stdout")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command")

    def group_args(sp):
        sp.add_argument("group", help="z, z2, f2, c5, heis, products like z2xf2")
        sp.add_argument("--generators", help="comma-separated normal forms (inverse-closed)")

    s = sub.add_parser("ball", help="surface and volume growth of a Cayley ball (CSV)")
    group_args(s)
    s.add_argument("N", type=int)
    s.add_argument("--counts-only", action="store_true", help="count spheres without storing elements")
    s.set_defaults(func=cmd_ball)

    s = sub.add_parser("growth", help="compare growth functions")
    s.add_argument("sigma")
    s.add_argument("other", nargs="?")
    s.add_argument("--check-submult", type=int, metavar="N")
    s.add_argument("--range", type=int, default=200, help="range checked by witness search")
    s.set_defaults(func=cmd_growth)

    def norm_args(sp, R_default=1.0):
        sp.add_argument("--sigma", default="poly(1,1)")
        sp.add_argument("--R", type=float, default=R_default)
        sp.add_argument("--radius", type=int, default=None)

    s = sub.add_parser("norm", help="weighted norms of element files")
    group_args(s)
    s.add_argument("elements", nargs="+")
    norm_args(s)
    s.add_argument("--p", type=float, default=1.0)
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("conv", help="convolution product with continuity checks")
    group_args(s)
    s.add_argument("a")
    s.add_argument("b")
    norm_args(s)
    s.add_argument("--check-submult", action="store_true")
    s.add_argument("--eps", type=float, default=None, help="almost-submultiplicative check with this eps")
    s.add_argument("--product", help="write ab to this file")
    s.set_defaults(func=cmd_conv)

    s = sub.add_parser("hopf", help="Hopf structure maps and norm identities")
    group_args(s)
    s.add_argument("a")
    norm_args(s)
    s.add_argument("--check-coproduct", action="store_true")
    s.add_argument("--bimodule", metavar="B", help="check the bimodule estimates against this element")
    s.add_argument("--eps", type=float, default=None)
    s.set_defaults(func=cmd_hopf)

    s = sub.add_parser("nuclearity", help="summability evidence over a rho grid")
    group_args(s)
    s.add_argument("sigma")
    s.add_argument("N", type=int, nargs="?", default=60)
    s.add_argument("--rho-grid", default=None, help="comma-separated grid (default 0.5,1,...,8)")
    s.add_argument("--delta", type=float, default=0.05)
    s.add_argument("--csv", default=None, help="write partial sums here")
    s.set_defaults(func=cmd_nuclearity)

    s = sub.add_parser("complete-growth", help="tail sums of the complete growth series")
    group_args(s)
    s.add_argument("sigma")
    s.add_argument("z", type=float)
    s.add_argument("R", type=float)
    s.add_argument("N", type=int)
    s.add_argument("--R-grid", default=None)
    s.add_argument("--delta", type=float, default=0.05)
    s.add_argument("--csv", default=None)
    s.set_defaults(func=cmd_complete_growth)

    s = sub.add_parser("bw", help="recursive factorial-scaled seminorms")
    group_args(s)
    s.add_argument("rho", type=float)
    s.add_argument("m", type=int)
    s.add_argument("element")
    s.add_argument("--ell", type=int, default=0)
    s.add_argument("--k", default=None, help="single base point (default: all k with L(k) <= --k-radius)")
    s.add_argument("--k-radius", type=int, default=2)
    s.add_argument("--radius", type=int, default=None, help="truncation radius")
    s.add_argument("--tail-fraction", type=float, default=1e-6)
    s.add_argument("--fit", action="store_true", help="also fit the comparison constants")
    s.add_argument("--eps", type=float, default=0.05)
    s.add_argument("--R", type=float, default=0.5)
    s.set_defaults(func=cmd_bw)

    s = sub.add_parser("verify-all", help="seeded sweep over all checks (deterministic JSON)")
    s.add_argument("--quick", action="store_true")
    s.set_defaults(func=cmd_verify_all)
    return p


_CONFIG_ARGS = {
    "ball": lambda c: [_group_text(c), str(c.radius)],
    "growth": lambda c: c.sigma[:2],
    "nuclearity": lambda c: [_group_text(c), c.sigma[0], str(c.radius or 60)]
    + (["--rho-grid", ",".join(map(str, c.rho_grid))] if c.rho_grid else []),
    "complete-growth": lambda c: [_group_text(c), c.sigma[0], str(c.z), str(c.R), str(c.radius)]
    + (["--R-grid", ",".join(map(str, c.R_grid))] if c.R_grid else []),
    "norm": lambda c: [_group_text(c), *c.elements, "--sigma", c.sigma[0], "--R", str(c.R), "--p", str(c.p)],
    "conv": lambda c: [_group_text(c), *c.elements[:2], "--sigma", c.sigma[0], "--R", str(c.R)]
    + (["--eps", str(c.eps)] if c.eps is not None else ["--check-submult"]),
    "hopf": lambda c: [_group_text(c), c.elements[0], "--sigma", c.sigma[0], "--R", str(c.R), "--check-coproduct"],
    "bw": lambda c: [_group_text(c), str(c.rho), str(c.m), c.elements[0], "--ell", str(c.ell)]
    + (["--radius", str(c.radius)] if c.radius is not None else []),
    "verify-all": lambda c: [],
}


def _group_text(c: ExperimentConfig) -> str:
    if not isinstance(c.group, str):
        raise ConfigError("command-line configs take the group as a shorthand string")
    return c.group


def config_argv(cfg: ExperimentConfig) -> list[str]:
    """Translate a config file into the equivalent argument vector."""
    if cfg.command not in _CONFIG_ARGS:
        raise ConfigError(f"unknown command {cfg.command!r}")
    argv = ["--seed", str(cfg.seed)]
    if cfg.cache_dir:
        argv += ["--cache-dir", cfg.cache_dir]
    if cfg.tolerance is not None:
        argv += ["--tolerance", str(cfg.tolerance)]
    if cfg.caps:
        argv += ["--caps", f"{cfg.caps[0]},{cfg.caps[1]}"]
    if cfg.output:
        argv += ["--output", cfg.output]
    argv += [cfg.command, *_CONFIG_ARGS[cfg.command](cfg)]
    if cfg.generators:
        argv += ["--generators", ",".join(cfg.generators)]
    if cfg.csv and cfg.command in ("nuclearity", "complete-growth"):
        argv += ["--csv", cfg.csv]
    return argv


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            args = parser.parse_args(config_argv(ExperimentConfig.load(args.config)))
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    set_tolerance(args.tolerance)
    if args.command is None:
        parser.print_help()
        return EXIT_INPUT
    try:
        return args.func(args)
    except (BallCapExceeded, TailNotNegligible) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, TypeError, KeyError, FamilyMismatch, PreconditionError, CacheCorrupt, OSError, OutOfBall) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()

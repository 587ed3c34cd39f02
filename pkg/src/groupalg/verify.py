"""The ``verify-all`` battery: a fixed, seeded sweep over every module.

The report is a plain dict with no timings or paths in it, so two runs with
the same seed serialize to the same bytes.
"""
from __future__ import annotations

import math

import numpy as np

from .algebra import AlgebraElement, random_element
from .ball import count_spheres, enumerate_ball
from .bw import BWEvaluator, check_pointwise, verify_comparison
from .diagnostics import SUMMABLE, complete_growth_tail, gp_verdict, minimal_R, surface_vs_volume
from .groups import parse_group
from .growth import (
    Factorial,
    Polynomial,
    SubExponential,
    check_submultiplicative,
    parse_growth,
    search_witness,
    stabilized_almost_constant,
    symbolic_compare,
)
from .norms import (
    CheckReport,
    NormSpec,
    check_bimodule_estimate,
    check_coproduct_identity,
    check_product_inequality,
    check_schauder_identity,
)

SIGMAS = ("poly(1,1)", "subexp(0.5)", "factorial")


def _round(x: float) -> float:
    # 12 significant digits keep reports stable across BLAS reduction orders
    return float(f"{x:.12g}")


def growth_tables() -> dict:
    z = count_spheres(parse_group("z"), 20)
    f2 = enumerate_ball(parse_group("f2"), 8)
    z2 = count_spheres(parse_group("z2"), 30)
    return {
        "z_sigma_is_2": all(s == 2 for s in z.sigma[1:]),
        "f2_sigma": list(f2.sigma),
        "f2_closed_form": all(f2.sigma[n] == 4 * 3 ** (n - 1) for n in range(1, 9))
        and all(f2.beta[n] == 2 * 3**n - 1 for n in range(9)),
        "z2_beta_closed_form": all(z2.beta[n] == 2 * n * n + 2 * n + 1 for n in range(31)),
    }


def metric_axioms(rng: np.random.Generator, pairs: int) -> dict:
    out = {}
    for name, N in (("z2", 10), ("f2", 6), ("heis", 6)):
        spec = parse_group(name)
        table = enumerate_ball(spec, N)
        E = table.elements
        inner = [g for g in E if table.length(g) <= N // 2]
        bad = int(table.length(spec.identity()) != 0)
        for _ in range(pairs):
            g = inner[rng.integers(len(inner))]
            h = inner[rng.integers(len(inner))]
            Lg, Lh = table.length(g), table.length(h)
            bad += Lg != table.length(spec._inv(g))
            bad += table.length(spec._mul(g, h)) > Lg + Lh
        out[name] = {"pairs": pairs, "violations": int(bad)}
    return out


def norm_identities(rng: np.random.Generator, count: int) -> dict:
    out = {}
    spec = parse_group("f2")
    table = enumerate_ball(spec, 5)
    pool = [g for g in table.elements if table.length(g) <= 2]
    for s in SIGMAS:
        sigma = parse_growth(s)
        sch, cop = CheckReport("schauder"), CheckReport("coproduct-norm")
        for R in (0, 1, 2, 5):
            for _ in range(count):
                a = random_element(rng, pool, spec)
                check_schauder_identity(a, NormSpec(sigma, R, table), sch)
                check_coproduct_identity(a, sigma, R, table, cop)
        out[s] = {"schauder": sch.summary()["violations"], "coproduct": cop.summary()["violations"], "checks": sch.checks}
    return out


def product_continuity(rng: np.random.Generator, count: int) -> dict:
    spec = parse_group("f2")
    table = enumerate_ball(spec, 4)
    pool = [g for g in table.elements if table.length(g) <= 2]
    sub = CheckReport("product")
    for s in ("poly(1,1)", "subexp(0.5)", "subexp(1)"):
        sigma = parse_growth(s)
        for _ in range(count):
            a, b = random_element(rng, pool, spec), random_element(rng, pool, spec)
            check_product_inequality(a, b, sigma, 1.5, table, report=sub)
    almost = {}
    fact = Factorial()
    for eps in (0.25, 0.5, 1.0):
        st = stabilized_almost_constant(fact, eps)
        rep = CheckReport("almost")
        c_log = math.log(st.value)
        for _ in range(count):
            a, b = random_element(rng, pool, spec), random_element(rng, pool, spec)
            check_product_inequality(a, b, fact, 1.0, table, eps=eps, c_log=c_log, report=rep)
        almost[str(eps)] = {"c": _round(st.value), "range": st.n_max, "violations": len(rep.violations)}
    return {"submultiplicative_violations": len(sub.violations), "checks": sub.checks, "almost": almost}


def bimodule(rng: np.random.Generator, count: int) -> dict:
    spec = parse_group("f2")
    table = enumerate_ball(spec, 4)
    pool = [g for g in table.elements if table.length(g) <= 2]
    rep = CheckReport("bimodule")
    almost = CheckReport("bimodule-almost")
    fact = Factorial()
    c_log = math.log(stabilized_almost_constant(fact, 0.5).value)
    for _ in range(count):
        a, b = random_element(rng, pool, spec), random_element(rng, pool, spec)
        check_bimodule_estimate(a, b, parse_growth("poly(1,1)"), 2.0, table, report=rep)
        check_bimodule_estimate(a, b, fact, 1.0, table, eps=0.5, c_log=c_log, report=almost)
    return {"checks": rep.checks + almost.checks, "violations": len(rep.violations) + len(almost.violations)}


NUCLEARITY_MATRIX = [
    (g, s) for g in ("z", "z2", "z3", "f2") for s in ("poly(1,1)", "subexp(1)", "factorial")
]


def nuclearity(N: int = 60, caps=(8, 8)) -> dict:
    rows = []
    contradictions = 0
    equivalence_failures = 0
    for g, s in NUCLEARITY_MATRIX:
        counts = count_spheres(parse_group(g), N)
        sigma = parse_growth(s)
        rep = gp_verdict(counts, sigma)
        witness = surface_vs_volume(counts, sigma, *caps).beta_witness
        tail_summable = any(
            complete_growth_tail(counts, sigma, R, 1.0).verdict == SUMMABLE for R in rep.grid
        )
        contradictions += rep.contradicts
        equivalence_failures += tail_summable != (witness is not None)
        rows.append(
            {
                "group": g,
                "sigma": s,
                "verdict": rep.verdict,
                "symbolic": rep.symbolic_verdict,
                "beta_witness": None if witness is None else [witness.c, witness.k],
            }
        )
    return {"cases": rows, "contradictions": contradictions, "equivalence_failures": equivalence_failures}


def complete_growth() -> dict:
    counts = count_spheres(parse_group("f2"), 30)
    sigma = SubExponential(1.0)
    rep = complete_growth_tail(counts, sigma, 2.0, 1.0)
    q = 3 / math.e**2
    closed = 1 + (4 / 3) * q / (1 - q)
    mr = minimal_R(counts, sigma, 1.0, [0.5 * i for i in range(1, 9)])
    return {
        "T30": _round(rep.total),
        "closed_form": _round(closed),
        "within_1e-6": abs(rep.total - closed) < 1e-6,
        "minimal_R": mr.R,
        "monotone": mr.monotone,
    }


def growth_catalog() -> dict:
    return {
        "poly_vs_subexp": symbolic_compare(Polynomial((1.0,)), SubExponential(0.5)),
        "poly_witness": list(_w(search_witness(Polynomial((1.0,)), SubExponential(0.5), 8, 8, 200))),
        "factorial_submultiplicative": check_submultiplicative(Factorial(), 30).holds,
        "poly_equivalent": symbolic_compare(parse_growth("poly(1,1)"), parse_growth("poly(0,3,0,1)")),
    }


def _w(w):
    return () if w is None else (w.c, w.k)


def bw_checks(rng: np.random.Generator, count: int, seed: int) -> dict:
    spec = parse_group("z")
    table = enumerate_ball(spec, 30)
    pool = [g for g in table.elements if table.length(g) <= 3]
    unit = AlgebraElement.unit(spec)
    out = {"pointwise": {}}
    worst = 0.0
    for rho in (0.5, 1.0, 2.0):
        ev = BWEvaluator(table, rho)
        logs, _ = ev.h_logs(unit, 1, 0, table.elements)
        out.setdefault("h1_unit_is_one", True)
        out["h1_unit_is_one"] &= bool(np.all(logs == 0.0))
        for m in range(4):
            rep = None
            for _ in range(count):
                rep = check_pointwise(ev, random_element(rng, pool, spec), m, rep)
            worst = max(worst, rep.worst_tail)
            out["pointwise"][f"rho={rho:g},m={m}"] = len(rep.violations)
    cmp = verify_comparison(table, 1.0, 2, 0.05, 0.5, seed=seed)
    out["comparison"] = {
        k: {"c": _round(v["c"]), "stable": v["stable"]} for k, v in cmp["fitted_constants"].items()
    }
    out["tail_below_1e-6"] = max(worst, cmp["worst_tail_bound"]) <= 1e-6
    return out


def run_all(seed: int = 42, quick: bool = False) -> dict:
    rng = np.random.default_rng(seed)
    n = 50 if quick else 250
    report = {
        "seed": seed,
        "quick": quick,
        "growth_tables": growth_tables(),
        "growth_catalog": growth_catalog(),
        "metric_axioms": metric_axioms(rng, 10 * n),
        "norm_identities": norm_identities(rng, n // 5),
        "product_continuity": product_continuity(rng, n),
        "bimodule": bimodule(rng, n),
        "nuclearity": nuclearity(),
        "complete_growth": complete_growth(),
        "bw": bw_checks(rng, n // 10, seed),
    }
    report["ok"] = all_ok(report)
    return report


def all_ok(r: dict) -> bool:
    gt = r["growth_tables"]
    checks = [
        gt["z_sigma_is_2"],
        gt["f2_closed_form"],
        gt["z2_beta_closed_form"],
        all(v["violations"] == 0 for v in r["metric_axioms"].values()),
        all(v["schauder"] == 0 and v["coproduct"] == 0 for v in r["norm_identities"].values()),
        r["product_continuity"]["submultiplicative_violations"] == 0,
        all(v["violations"] == 0 for v in r["product_continuity"]["almost"].values()),
        r["bimodule"]["violations"] == 0,
        r["nuclearity"]["contradictions"] == 0,
        r["nuclearity"]["equivalence_failures"] == 0,
        r["complete_growth"]["within_1e-6"],
        r["bw"]["h1_unit_is_one"],
        all(v == 0 for v in r["bw"]["pointwise"].values()),
        all(v["stable"] for v in r["bw"]["comparison"].values()),
        r["bw"]["tail_below_1e-6"],
    ]
    return all(bool(x) for x in checks)

"""Acceptance criteria 1-9, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""
import itertools
import json
import math
import sys
import time

import numpy as np
import pytest

from groupalg.algebra import AlgebraElement, random_element
from groupalg.ball import count_spheres, enumerate_ball
from groupalg.bw import BWEvaluator, check_pointwise, verify_comparison
from groupalg.cli import main
from groupalg.diagnostics import (
    DIVERGENT,
    SUMMABLE,
    complete_growth_tail,
    gp_verdict,
    minimal_R,
    surface_vs_volume,
)
from groupalg.groups import parse_group
from groupalg.growth import (
    Factorial,
    SubExponential,
    fit_almost_submultiplicative,
    parse_growth,
    stabilized_almost_constant,
)
from groupalg.norms import (
    CheckReport,
    NormSpec,
    check_bimodule_estimate,
    check_coproduct_identity,
    check_product_inequality,
    check_schauder_identity,
)

SEED = 42
LINES: dict = {}


def _record(n: int, ok: bool, detail: str, seconds: float) -> None:
    line = f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} ({seconds:.1f}s) {detail}"
    LINES[n] = line
    if __name__ == "__main__":
        print(line, flush=True)


def _pool(table, r):
    return [g for g in table.elements if table.length(g) <= r]


# 1 -------------------------------------------------------------------------

def _free_oracle(n_max):
    """Reduce every word of length <= n_max and bucket by reduced length."""
    seen = set()
    for n in range(n_max + 1):
        for w in itertools.product((1, -1, 2, -2), repeat=n):
            out = []
            for x in w:
                if out and out[-1] == -x:
                    out.pop()
                else:
                    out.append(x)
            seen.add(tuple(out))
    sigma = [0] * (n_max + 1)
    for w in seen:
        sigma[len(w)] += 1
    return sigma


def criterion_1():
    times, ok = [], True
    t = time.perf_counter()
    z = enumerate_ball(parse_group("z"), 20)
    ok &= all(z.sigma[n] == 2 for n in range(1, 21))
    times.append(time.perf_counter() - t)

    t = time.perf_counter()
    f2 = enumerate_ball(parse_group("f2"), 8)
    oracle = _free_oracle(8)
    ok &= list(f2.sigma) == oracle
    ok &= all(f2.sigma[n] == 4 * 3 ** (n - 1) for n in range(1, 9))
    ok &= all(f2.beta[n] == 2 * 3**n - 1 for n in range(9))
    times.append(time.perf_counter() - t)

    t = time.perf_counter()
    z2 = enumerate_ball(parse_group("z2"), 30)
    lattice = [sum(1 for x in range(-n, n + 1) for y in range(-n, n + 1) if abs(x) + abs(y) <= n) for n in range(31)]
    ok &= list(z2.beta) == lattice
    ok &= all(z2.beta[n] == 2 * n * n + 2 * n + 1 for n in range(31))
    times.append(time.perf_counter() - t)
    ok &= max(times) < 10
    return ok, f"tables match oracles; slowest table {max(times):.2f}s"


# 2 -------------------------------------------------------------------------

def criterion_2(pairs=10_000):
    rng = np.random.default_rng(SEED)
    bad, parts = 0, []
    for name in ("z2", "f2", "heis"):
        spec = parse_group(name)
        table = enumerate_ball(spec, 10)
        E = table.elements
        inner = _pool(table, 5)
        bad += table.length(spec.identity()) != 0
        gi = rng.integers(len(inner), size=pairs)
        hi = rng.integers(len(inner), size=pairs)
        for i, j in zip(gi, hi):
            g, h = inner[i], inner[j]
            Lg, Lh = table.length(g), table.length(h)
            bad += Lg != table.length(spec._inv(g))
            bad += table.length(spec._mul(g, h)) > Lg + Lh
        # symmetry over the whole ball as well
        bad += sum(table.length(g) != table.length(spec._inv(g)) for g in E)
        parts.append(f"{name}:{len(E)}")
    return bad == 0, f"{pairs} pairs per group ({', '.join(parts)} ball elements), {bad} violations"


# 3 -------------------------------------------------------------------------

SIGMAS = ("poly(1,1)", "subexp(0.5)", "factorial")


def criterion_3(count=1000):
    rng = np.random.default_rng(SEED)
    spec = parse_group("f2")
    table = enumerate_ball(spec, 6)
    pool = _pool(table, 6)
    sch, cop = CheckReport("schauder"), CheckReport("coproduct")
    for _ in range(count):
        a = random_element(rng, pool, spec, 8)
        for s in SIGMAS:
            sigma = parse_growth(s)
            for R in (0, 1, 2, 5):
                check_schauder_identity(a, NormSpec(sigma, R, table), sch)
                check_coproduct_identity(a, sigma, R, table, cop)
    ok = sch.holds and cop.holds and max(sch.worst_gap, cop.worst_gap) <= 1e-9
    return ok, f"{sch.checks}+{cop.checks} checks, worst log gap {max(sch.worst_gap, cop.worst_gap):.1e}"


# 4 -------------------------------------------------------------------------

def criterion_4(count=1000):
    rng = np.random.default_rng(SEED)
    spec = parse_group("f2")
    table = enumerate_ball(spec, 6)
    pool = _pool(table, 3)
    sub = CheckReport("sub")
    for s in ("poly(1,1)", "subexp(0.5)", "subexp(1)"):
        sigma = parse_growth(s)
        for _ in range(count):
            a, b = random_element(rng, pool, spec), random_element(rng, pool, spec)
            check_product_inequality(a, b, sigma, 2.0, table, report=sub)
    zspec = parse_group("z")
    ztab = enumerate_ball(zspec, 40)
    zpool = _pool(ztab, 10)
    almost_ok, consts = True, []
    for eps in (0.25, 0.5, 1.0):
        st = stabilized_almost_constant(Factorial(), eps)
        change = abs(fit_almost_submultiplicative(Factorial(), eps, 2 * st.n_max) - st.value) / st.value
        rep = CheckReport("almost")
        c_log = math.log(st.value)
        for _ in range(count):
            a, b = random_element(rng, zpool, zspec), random_element(rng, zpool, zspec)
            check_product_inequality(a, b, Factorial(), 1.0, ztab, eps=eps, c_log=c_log, report=rep)
        almost_ok &= rep.holds and change < 0.05
        consts.append(f"eps={eps:g}: c={st.value:.4g}")
    ok = sub.holds and almost_ok
    return ok, f"(i) {sub.checks} checks, {len(sub.violations)} violations; (ii) {'; '.join(consts)}"


# 5 -------------------------------------------------------------------------

def criterion_5(count=1000):
    rng = np.random.default_rng(SEED)
    reps = []
    for name, radius in (("z2", 8), ("f2", 5)):
        spec = parse_group(name)
        table = enumerate_ball(spec, radius)
        pool = _pool(table, radius // 2)
        sub, almost = CheckReport("sub"), CheckReport("almost")
        c_log = math.log(stabilized_almost_constant(Factorial(), 0.5).value)
        for _ in range(count):
            a, b = random_element(rng, pool, spec), random_element(rng, pool, spec)
            check_bimodule_estimate(a, b, parse_growth("poly(1,1)"), 2.0, table, report=sub)
            check_bimodule_estimate(a, b, Factorial(), 1.0, table, eps=0.5, c_log=c_log, report=almost)
        reps += [sub, almost]
    checks = sum(r.checks for r in reps)
    bad = sum(len(r.violations) for r in reps)
    return bad == 0, f"{checks} checks on {count} pairs per group, {bad} violations"


# 6 -------------------------------------------------------------------------

MATRIX = [(g, s) for g in ("z", "z2", "z3", "f2") for s in ("poly(1,1)", "subexp(1)", "factorial")]


def criterion_6():
    lin = parse_growth("poly(1,1)")
    ok = True
    r = gp_verdict(count_spheres(parse_group("f2"), 60), lin)
    ok &= r.verdict == DIVERGENT and r.symbolic_verdict == "not-nuclear"
    for g in ("z", "z2", "z3"):
        r = gp_verdict(count_spheres(parse_group(g), 60), lin)
        ok &= r.verdict == SUMMABLE and r.symbolic_verdict == "nuclear"
    r = gp_verdict(count_spheres(parse_group("f2"), 60), SubExponential(1.0))
    ok &= r.verdict == SUMMABLE
    contradictions = 0
    for g, s in MATRIX:
        contradictions += gp_verdict(count_spheres(parse_group(g), 60), parse_growth(s)).contradicts
    ok &= contradictions == 0
    return ok, f"dichotomy reproduced; {contradictions} contradictions over {len(MATRIX)} cases"


# 7 -------------------------------------------------------------------------

def criterion_7():
    counts = count_spheres(parse_group("f2"), 30)
    sigma = SubExponential(1.0)
    q = 3 / math.e**2
    closed = 1 + (4 / 3) * q / (1 - q)
    T30 = complete_growth_tail(counts, sigma, 2.0, 1.0).total
    grid = [0.5 * i for i in range(1, 9)]
    mr = minimal_R(counts, sigma, 1.0, grid)
    first_above = min(R for R in grid if R > math.log(3))
    failures = 0
    for g, s in MATRIX:
        c = count_spheres(parse_group(g), 60)
        sig = parse_growth(s)
        summable = any(complete_growth_tail(c, sig, R, 1.0).verdict == SUMMABLE for R in (0.5 * i for i in range(1, 17)))
        failures += summable != (surface_vs_volume(c, sig).beta_witness is not None)
    ok = abs(T30 - closed) < 1e-6 and mr.R == first_above and failures == 0
    return ok, f"T30={T30:.9f} closed={closed:.9f}; minimal R={mr.R}; {failures} equivalence failures"


# 8 -------------------------------------------------------------------------

def criterion_8(count=1000):
    rng = np.random.default_rng(SEED)
    ok = True
    # h_{1,0,k}(e_e) = 1 on several balls
    for name, radius in (("z", 30), ("z2", 10), ("f2", 5), ("heis", 5)):
        table = enumerate_ball(parse_group(name), radius)
        logs, rel = BWEvaluator(table, 1.0).h_logs(AlgebraElement.unit(table.spec), 1, 0, table.elements)
        ok &= bool(np.all(logs == 0.0)) and bool(np.all(rel == 0.0))
    spec = parse_group("z")
    table = enumerate_ball(spec, 30)
    pool = _pool(table, 3)
    elements = [random_element(rng, pool, spec) for _ in range(count)]
    checks = violations = 0
    worst = 0.0
    for rho in (0.5, 1.0, 2.0):
        ev = BWEvaluator(table, rho)
        for m in range(4):
            rep = None
            for a in elements:
                rep = check_pointwise(ev, a, m, rep)
            checks += rep.checks
            violations += len(rep.violations)
            worst = max(worst, rep.worst_tail)
    ok &= violations == 0
    fits = []
    for rho, m, eps, R in ((1.0, 2, 0.05, 0.5), (2.0, 1, 0.1, 1.0)):
        cmp = verify_comparison(table, rho, m, eps, R, seed=SEED)
        fc = cmp["fitted_constants"]
        ok &= fc["upper"]["stable"] and fc["decay"]["stable"] and cmp["pointwise"]["holds"]
        worst = max(worst, cmp["worst_tail_bound"])
        fits.append(f"rho={rho:g},m={m}: upper {fc['upper']['c']:.4g}, decay {fc['decay']['c']:.4g}")
    ok &= worst <= 1e-6
    return ok, f"{checks} pointwise checks, {violations} violations; worst tail {worst:.1e}; {'; '.join(fits)}"


# 9 -------------------------------------------------------------------------

def criterion_9(tmp_dir):
    paths = [f"{tmp_dir}/verify_{i}.json" for i in range(2)]
    codes = [main(["--seed", str(SEED), "-o", p, "verify-all"]) for p in paths]
    blobs = [open(p, "rb").read() for p in paths]
    ok = blobs[0] == blobs[1] and codes == [0, 0] and json.loads(blobs[0])["ok"] is True
    return ok, f"{len(blobs[0])} bytes, identical={blobs[0] == blobs[1]}, exit codes {codes}"


LIMITS = {1: 30, 6: 30, 8: 60}


def _run(n, fn, *args):
    t = time.perf_counter()
    ok, detail = fn(*args)
    dt = time.perf_counter() - t
    if n in LIMITS and dt >= LIMITS[n]:
        ok, detail = False, detail + f"; over the {LIMITS[n]}s budget"
    _record(n, ok, detail, dt)
    return ok


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("n", range(1, 9))
def test_criterion(n):
    assert _run(n, CRITERIA[n - 1])


def test_criterion_9(tmp_path):
    assert _run(9, criterion_9, str(tmp_path))


if __name__ == "__main__":
    import tempfile

    results = [_run(n, fn) for n, fn in enumerate(CRITERIA, 1)]
    with tempfile.TemporaryDirectory() as d:
        results.append(_run(9, criterion_9, d))
    sys.exit(0 if all(results) else 1)

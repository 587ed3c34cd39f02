"""Finite-range evidence for nuclearity and for convergence of the complete
growth series.

Summability cannot be decided from finitely many terms.  The operational
rule used throughout: look at the term ratios over the last quarter of the
tabulated range; all below ``1 - delta`` is summable evidence, all above
``1 + delta`` is divergent evidence.  When the ratios hug 1 (polynomial
tails) Raabe's statistic decides with the same margin around 1; anything
else is inconclusive.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraElement
from .ball import LengthTable, OutOfBall
from .growth import (
    GrowthFunction,
    GrowthWitness,
    Polynomial,
    Sampled,
    beta_precedes_symbolic,
    search_witness_logs,
)
from .norms import weighted_l1, weighted_sup

DELTA = 0.05
DEFAULT_GRID = tuple(0.5 * i for i in range(1, 17))

SUMMABLE = "summable-evidence"
DIVERGENT = "divergent-evidence"
INCONCLUSIVE = "inconclusive"


def _count_logs(values) -> np.ndarray:
    arr = np.array([float(v) for v in values])
    with np.errstate(divide="ignore"):
        return np.log(arr)


def _check_range(counts, n_max: int) -> None:
    if n_max > counts.radius:
        raise OutOfBall(f"shell {n_max}", counts.radius)


def term_logs(counts, sigma: GrowthFunction, rho: float, n_max: int, z: float = 1.0) -> np.ndarray:
    """log(|z|^n sigma_G(n) / sigma(n)^rho) for n = 0..n_max."""
    _check_range(counts, n_max)
    n = np.arange(n_max + 1)
    with np.errstate(divide="ignore"):
        logz = math.log(abs(z)) if z != 0 else -math.inf
        zpart = np.where(n == 0, 0.0, n * logz) if z != 0 else np.where(n == 0, 0.0, -np.inf)
    return _count_logs(counts.sigma[: n_max + 1]) - rho * sigma.logs(n_max) + zpart


def partial_sum_logs(terms: np.ndarray) -> np.ndarray:
    return np.logaddexp.accumulate(terms)


def ratio_statistics(terms: np.ndarray) -> np.ndarray:
    """r_n = t_{n+1} / t_n; vanishing terms give ratio 0."""
    a, b = terms[:-1], terms[1:]
    out = np.zeros(len(a))
    live = np.isfinite(b)
    both = live & np.isfinite(a)
    out[both] = np.exp(b[both] - a[both])
    out[live & ~np.isfinite(a)] = math.inf
    return out


def _last_quarter(n: int) -> int:
    return n - max(1, math.ceil(n / 4))


def raabe_statistics(ratios: np.ndarray) -> np.ndarray:
    """n (t_n / t_{n+1} - 1); tends to p for terms like n^-p."""
    n = np.arange(len(ratios), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return n * (1.0 / ratios - 1.0)


def ratio_verdict(ratios: np.ndarray, delta: float = DELTA) -> str:
    """Ratio test on the last quarter, then Raabe's test if that is inconclusive.

    Polynomial tails have ratios tending to 1, which no fixed margin can
    separate; Raabe's statistic tends to the decay exponent instead.
    """
    n = len(ratios)
    if n == 0:
        return INCONCLUSIVE
    start = _last_quarter(n)
    tail = ratios[start:]
    if np.all(tail < 1 - delta):
        return SUMMABLE
    if np.all(tail > 1 + delta):
        return DIVERGENT
    raabe = raabe_statistics(ratios)[start:]
    if start > 0 and np.all(raabe > 1 + delta):
        return SUMMABLE
    if start > 0 and np.all(raabe < 1 - delta):
        return DIVERGENT
    return INCONCLUSIVE


def _floats(logs: np.ndarray) -> list:
    out = []
    for x in logs:
        if x > 709:
            out.append(None)
        else:
            out.append(float(math.exp(x)))
    return out


def _clean_ratios(r: np.ndarray) -> list:
    return [None if not math.isfinite(x) else float(x) for x in r]


# Grothendieck-Pietsch summability

def gp_partial_sums(counts, sigma: GrowthFunction, rho: float, n_max: int) -> np.ndarray:
    """S_n(rho) = sum_{j <= n} sigma_G(j) / sigma(j)^rho for n = 0..n_max."""
    return np.exp(partial_sum_logs(term_logs(counts, sigma, rho, n_max)))


@dataclass
class GPReport:
    group: str
    generators: list
    sigma: str
    n_max: int
    grid: list
    partial_sums: list
    ratios: list
    per_rho: list
    verdict: str
    symbolic_verdict: str | None = None
    growth_class: str | None = None

    @property
    def contradicts(self) -> bool:
        return (self.verdict == SUMMABLE and self.symbolic_verdict == "not-nuclear") or (
            self.verdict == DIVERGENT and self.symbolic_verdict == "nuclear"
        )

    def to_json(self) -> dict:
        d = {
            "group": self.group,
            "generators": self.generators,
            "sigma": self.sigma,
            "N": self.n_max,
            "grid": self.grid,
            "partial_sums": self.partial_sums,
            "ratios": self.ratios,
            "per_rho_verdicts": self.per_rho,
            "verdict": self.verdict,
        }
        if self.symbolic_verdict is not None:
            d["symbolic_verdict"] = self.symbolic_verdict
            d["growth_class"] = self.growth_class
            d["symbolic_source"] = "standard growth class of the group family (external fact)"
        return d


def _combine(verdicts: list) -> str:
    if SUMMABLE in verdicts:
        return SUMMABLE
    if verdicts and all(v == DIVERGENT for v in verdicts):
        return DIVERGENT
    return INCONCLUSIVE


def symbolic_nuclear(spec, sigma: GrowthFunction) -> str | None:
    verdict = beta_precedes_symbolic(spec.growth_class(), sigma)
    if verdict is None:
        return None
    return "nuclear" if verdict else "not-nuclear"


def _class_label(spec) -> str:
    kind, d = spec.growth_class()
    return f"polynomial degree {d}" if kind == "poly" else ("exponential" if kind == "exp" else "bounded")


def gp_verdict(
    counts, sigma: GrowthFunction, rho_grid=DEFAULT_GRID, n_max: int | None = None, delta: float = DELTA
) -> GPReport:
    n_max = counts.radius if n_max is None else n_max
    sums, ratios, per = [], [], []
    for rho in rho_grid:
        t = term_logs(counts, sigma, rho, n_max)
        r = ratio_statistics(t)
        sums.append(_floats(partial_sum_logs(t)))
        ratios.append(_clean_ratios(r))
        per.append(ratio_verdict(r, delta))
    spec = counts.spec
    sym = None if isinstance(sigma, Sampled) else symbolic_nuclear(spec, sigma)
    return GPReport(
        group=spec.name,
        generators=[spec.format(g) for g in spec.generators],
        sigma=str(sigma),
        n_max=n_max,
        grid=[float(r) for r in rho_grid],
        partial_sums=sums,
        ratios=ratios,
        per_rho=per,
        verdict=_combine(per),
        symbolic_verdict=sym,
        growth_class=_class_label(spec) if sym is not None else None,
    )


# volume versus surface growth

@dataclass
class VolumeSurfaceReport:
    sigma_witness: GrowthWitness | None
    beta_witness: GrowthWitness | None
    constructed: GrowthWitness | None
    construction_holds: bool | None
    consistent: bool

    def to_json(self) -> dict:
        def w(x):
            return None if x is None else {"c": x.c, "k": x.k, "N": x.checked_range}

        return {
            "sigma_G_witness": w(self.sigma_witness),
            "beta_G_witness": w(self.beta_witness),
            "constructed_beta_witness": w(self.constructed),
            "construction_holds": self.construction_holds,
            "consistent": self.consistent,
        }


def surface_vs_volume(counts, sigma: GrowthFunction, c_max: int = 8, k_max: int = 8) -> VolumeSurfaceReport:
    """Witness search for sigma_G [= sigma and beta_G [= sigma on the sampled range.

    A witness (c, k) for sigma_G gives beta_G(n) <= c (1+n) sigma(cn)^k; with a
    witness (c1, k1) for 1+n [= sigma this becomes the explicit witness
    (max(c c1, c, c1), k + k1) for beta_G, which is verified directly.
    """
    n_max = counts.radius
    if n_max < 4:
        raise ValueError("need a radius of at least 4")
    s_logs = _count_logs(counts.sigma)
    b_logs = _count_logs(counts.beta)
    sw = search_witness_logs(s_logs, sigma, c_max, k_max)
    bw = search_witness_logs(b_logs, sigma, c_max, k_max)
    constructed, holds = None, None
    if sw is not None:
        n = np.arange(n_max + 1)
        bound = math.log(sw.c) + np.log1p(n) + sw.k * np.array([sigma.log(sw.c * i) for i in n])
        direct = bool(np.all(b_logs <= bound + 1e-12 * np.maximum(1, np.abs(bound))))
        lin = search_witness_logs(np.log1p(n.astype(float)), sigma, max(c_max, 64), max(k_max, 64))
        if lin is not None:
            C = max(sw.c * lin.c, sw.c, lin.c)
            K = sw.k + lin.k
            rhs = math.log(C) + K * np.array([sigma.log(C * i) for i in n])
            constructed = GrowthWitness(C, K, n_max)
            holds = direct and bool(np.all(b_logs <= rhs + 1e-12 * np.maximum(1, np.abs(rhs))))
        else:
            holds = direct
    consistent = (sw is None) == (bw is None) or (sw is not None and bool(holds))
    return VolumeSurfaceReport(sw, bw, constructed, holds, consistent)


# l^1 versus l^inf

@dataclass
class SandwichResult:
    R_prime: float
    c: float
    truncated_sum: float
    tail_estimate: float


def sandwich_constant(counts, sigma: GrowthFunction, gap: float, delta: float = DELTA):
    """sum_g sigma(L(g))^{-gap}: truncated sum over the ball plus a tail
    estimate from the last-quarter ratios (geometric, or power-law when only
    Raabe's test applies).  None if the ratio test does
    not give summable evidence.
    """
    t = term_logs(counts, sigma, gap, counts.radius)
    r = ratio_statistics(t)
    if ratio_verdict(r, delta) != SUMMABLE:
        return None
    truncated = float(np.exp(partial_sum_logs(t)[-1]))
    start = _last_quarter(len(r))
    tail_r = float(np.max(r[start:]))
    last = float(np.exp(t[-1]))
    if tail_r < 1 - delta:
        tail = last * tail_r / (1 - tail_r)
    else:
        # Raabe branch: terms ~ C n^-p, tail ~ t_N N / (p - 1)
        p = float(np.min(raabe_statistics(r)[start:]))
        tail = last * len(r) / (p - 1)
    return truncated, tail


def norm_sandwich(
    table: LengthTable,
    sigma: GrowthFunction,
    R: float,
    samples: list[AlgebraElement],
    R_grid=None,
    delta: float = DELTA,
) -> SandwichResult | None:
    """First R' > R on the grid with ||a||_{L,sigma,R} <= c ||a||_{inf,L,sigma,R'}
    for every sample, using c = sum_g sigma(L(g))^{-(R'-R)}.
    """
    grid = R_grid if R_grid is not None else [R + x for x in DEFAULT_GRID]
    counts = table.counts
    for Rp in sorted(x for x in grid if x > R):
        got = sandwich_constant(counts, sigma, Rp - R, delta)
        if got is None:
            continue
        truncated, tail = got
        c = truncated + tail
        ok = all(
            weighted_l1(a, sigma, R, table).log <= math.log(c) + weighted_sup(a, sigma, Rp, table).log + 1e-9
            for a in samples
        )
        if ok:
            return SandwichResult(Rp, c, truncated, tail)
    return None


# complete growth series

def complete_growth_shell(table: LengthTable, n: int) -> AlgebraElement:
    """sum of e_g over the sphere of radius n."""
    return AlgebraElement(table.spec, {g: 1.0 for g in table.shell(n)})


@dataclass
class CompleteGrowthReport:
    group: str
    sigma: str
    R: float
    z: complex
    n_max: int
    shell_sizes: list
    tail_sums: list
    ratios: list
    verdict: str

    @property
    def total(self) -> float:
        return self.tail_sums[-1]

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "sigma": self.sigma,
            "R": self.R,
            "z": [self.z.real, self.z.imag],
            "N": self.n_max,
            "shell_sizes": self.shell_sizes,
            "partial_sums": self.tail_sums,
            "ratios": self.ratios,
            "verdict": self.verdict,
        }


def complete_growth_tail(
    counts, sigma: GrowthFunction, R: float, z: complex, n_max: int | None = None, delta: float = DELTA
) -> CompleteGrowthReport:
    """T_N = sum_{n <= N} |z|^n sigma_G(n) / sigma(n)^R with the ratio verdict."""
    z = complex(z)
    if abs(z) > 1:
        raise ValueError("the complete growth series is only considered for |z| <= 1")
    n_max = counts.radius if n_max is None else n_max
    t = term_logs(counts, sigma, R, n_max, abs(z))
    r = ratio_statistics(t)
    return CompleteGrowthReport(
        group=counts.spec.name,
        sigma=str(sigma),
        R=float(R),
        z=z,
        n_max=n_max,
        shell_sizes=[int(x) for x in counts.sigma[: n_max + 1]],
        tail_sums=_floats(partial_sum_logs(t)),
        ratios=_clean_ratios(r),
        verdict=ratio_verdict(r, delta),
    )


@dataclass
class MinimalR:
    R: float | None
    verdicts: dict = field(default_factory=dict)
    monotone: bool = True


def minimal_R(counts, sigma: GrowthFunction, z: complex = 1.0, R_grid=DEFAULT_GRID, delta: float = DELTA) -> MinimalR:
    """Smallest grid R whose complete-growth tail shows summable evidence."""
    grid = sorted(R_grid)
    verdicts = {R: complete_growth_tail(counts, sigma, R, z, delta=delta).verdict for R in grid}
    first = next((R for R in grid if verdicts[R] == SUMMABLE), None)
    monotone = first is None or all(verdicts[R] == SUMMABLE for R in grid if R >= first)
    return MinimalR(first, verdicts, monotone)


def linear_growth() -> Polynomial:
    return Polynomial((1.0,))


def series_csv(report) -> str:
    """Partial sums per grid point (GP report) or per N (complete growth) as CSV."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    if isinstance(report, GPReport):
        w.writerow(["n"] + [f"S(rho={r:g})" for r in report.grid])
        for n in range(report.n_max + 1):
            w.writerow([n] + [s[n] for s in report.partial_sums])
    else:
        w.writerow(["n", "sigma_G", "T"])
        for n, (s, t) in enumerate(zip(report.shell_sizes, report.tail_sums)):
            w.writerow([n, s, t])
    return out.getvalue()

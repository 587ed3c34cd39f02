"""Weighted l^p norms on C[G] and the norm inequalities they satisfy.

All norms come back as :class:`LogValue`.  Small weights are summed as
plain floats; once any log-weight exceeds ``LOG_CROSSOVER`` the sum moves to
log-sum-exp so that factorial weights survive.
"""
from __future__ import annotations

import io
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraElement, ProductAlgebraElement, antipode, convolve
from .ball import LengthTable, OutOfBall
from .growth import (
    GrowthFunction,
    check_submultiplicative,
    fit_almost_submultiplicative_log,
)
from .logvalue import EQ_TOL, LogValue, log_close, log_leq, log_sum

LOG_CROSSOVER = 600.0


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class NormSpec:
    sigma: GrowthFunction
    R: float
    table: LengthTable
    p: float = 1.0

    def __post_init__(self):
        if not (self.p >= 1):
            raise ValueError("p must lie in [1, inf]")


def _lengths(a: AlgebraElement, table: LengthTable) -> np.ndarray:
    lengths = table.lengths
    try:
        return np.fromiter((lengths[g] for g in a.coeffs), dtype=np.int64, count=len(a.coeffs))
    except KeyError as exc:
        raise OutOfBall(exc.args[0], table.radius) from None


def _log_abs(a: AlgebraElement) -> np.ndarray:
    return np.log(np.abs(np.fromiter(a.coeffs.values(), dtype=complex, count=len(a.coeffs))))


def _sigma_logs(sigma: GrowthFunction, n_max: int) -> np.ndarray:
    return sigma.logs(n_max)


def _sum_of_logs(terms: np.ndarray, exact_hint: float) -> float:
    """log(sum(exp(terms))), in plain floats when the magnitudes allow it."""
    if terms.size == 0:
        return -math.inf
    if exact_hint <= LOG_CROSSOVER and np.max(terms) <= LOG_CROSSOVER:
        total = math.fsum(np.exp(terms))
        return math.log(total) if total > 0 else -math.inf
    return log_sum(terms)


def weighted_logs(a: AlgebraElement, sigma: GrowthFunction, R: float, table: LengthTable) -> np.ndarray:
    """log(|a_g| sigma(L(g))^R) for each support element."""
    if not a.coeffs:
        return np.zeros(0)
    L = _lengths(a, table)
    sl = _sigma_logs(sigma, int(L.max()))
    return _log_abs(a) + R * sl[L]


def norm(a: AlgebraElement, spec: NormSpec) -> LogValue:
    """||a||_{l^p, L, sigma, R}; p = inf gives the weighted sup norm."""
    if not a.coeffs:
        return LogValue.zero()
    L = _lengths(a, spec.table)
    sl = _sigma_logs(spec.sigma, int(L.max()))
    logw = spec.R * sl[L]
    terms = _log_abs(a) + logw
    if math.isinf(spec.p):
        return LogValue(float(terms.max()))
    hint = float(np.max(np.abs(logw))) if logw.size else 0.0
    return LogValue(_sum_of_logs(spec.p * terms, spec.p * hint) / spec.p)


def weighted_l1(a: AlgebraElement, sigma: GrowthFunction, R: float, table: LengthTable) -> LogValue:
    return norm(a, NormSpec(sigma, R, table, 1.0))


def weighted_sup(b: AlgebraElement, sigma: GrowthFunction, R: float, table: LengthTable) -> LogValue:
    """sup_g |b_g| sigma(L(g))^R; pass a negative R for the dual norm."""
    return norm(b, NormSpec(sigma, R, table, math.inf))


def plain_l1(a: AlgebraElement) -> float:
    return math.fsum(abs(c) for c in a.coeffs.values())


def basis_norm(g, spec: NormSpec) -> LogValue:
    """||e_g|| = sigma(L(g))^R."""
    return LogValue(spec.R * spec.sigma.log(spec.table.length(g)))


def schauder_sum(a: AlgebraElement, spec: NormSpec) -> LogValue:
    """sum_g |a_g| ||e_g||, accumulated term by term."""
    total = LogValue.zero()
    for g, c in a.coeffs.items():
        total = total + LogValue.of(abs(c)) * basis_norm(g, spec)
    return total


def tensor_norm(x: ProductAlgebraElement, sigma: GrowthFunction, R: float, table: LengthTable) -> LogValue:
    """Projective tensor norm of ||.||_R with itself on C[G x G].

    For weighted l^1 norms this is the l^1 norm with weight
    sigma(L(g))^R sigma(L(h))^R at (g, h).
    """
    if not x.coeffs:
        return LogValue.zero()
    lengths = table.lengths
    try:
        Lg = np.array([lengths[g] for g, _ in x.coeffs])
        Lh = np.array([lengths[h] for _, h in x.coeffs])
    except KeyError as exc:
        raise OutOfBall(exc.args[0], table.radius) from None
    sl = _sigma_logs(sigma, int(max(Lg.max(), Lh.max())))
    la = np.log(np.abs(np.fromiter(x.coeffs.values(), dtype=complex, count=len(x.coeffs))))
    logw = R * (sl[Lg] + sl[Lh])
    return LogValue(_sum_of_logs(la + logw, float(np.max(np.abs(logw)))))


# inequality reports

_tolerance = EQ_TOL


def set_tolerance(rel: float) -> None:
    """Relative slack used by every CheckReport comparison from now on."""
    global _tolerance
    if not rel >= 0:
        raise ValueError("tolerance must be >= 0")
    _tolerance = rel


@dataclass
class CheckReport:
    """Tally of one family of inequality (or equality) checks."""

    name: str
    checks: int = 0
    violations: list = field(default_factory=list)
    worst_gap: float = -math.inf
    details: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return not self.violations

    def leq(self, lhs, rhs, context=None, rel: float | None = None) -> bool:
        rel = _tolerance if rel is None else rel
        lhs = lhs.log if isinstance(lhs, LogValue) else lhs
        rhs = rhs.log if isinstance(rhs, LogValue) else rhs
        self.checks += 1
        if math.isfinite(lhs):
            self.worst_gap = max(self.worst_gap, lhs - rhs)
        ok = log_leq(lhs, rhs, rel)
        if not ok:
            self.violations.append({"lhs_log": lhs, "rhs_log": rhs, "context": context})
        return ok

    def eq(self, lhs, rhs, context=None, rel: float | None = None) -> bool:
        rel = _tolerance if rel is None else rel
        lhs = lhs.log if isinstance(lhs, LogValue) else lhs
        rhs = rhs.log if isinstance(rhs, LogValue) else rhs
        self.checks += 1
        if math.isfinite(lhs) and math.isfinite(rhs):
            self.worst_gap = max(self.worst_gap, abs(lhs - rhs))
        ok = log_close(lhs, rhs, rel)
        if not ok:
            self.violations.append({"lhs_log": lhs, "rhs_log": rhs, "context": context})
        return ok

    def merge(self, other: "CheckReport") -> "CheckReport":
        self.checks += other.checks
        self.violations += other.violations
        self.worst_gap = max(self.worst_gap, other.worst_gap)
        return self

    def summary(self) -> dict:
        return {
            "name": self.name,
            "checks": self.checks,
            "violations": len(self.violations),
            "holds": self.holds,
            "worst_gap_log": None if math.isinf(self.worst_gap) else self.worst_gap,
            **self.details,
        }


def _max_len(table: LengthTable, *elements: AlgebraElement) -> int:
    out = 0
    for x in elements:
        if x.coeffs:
            out = max(out, int(_lengths(x, table).max()))
    return out


def almost_constant_log(sigma: GrowthFunction, R: float, eps: float, n_max: int) -> float:
    """log of the constant c with sigma(n+m)^R <= c (sigma(n) sigma(m))^(R+eps) on n+m <= n_max.

    Obtained from the fitted constant of sigma(n+m) <= c' (sigma(n) sigma(m))^(1+eps/R)
    raised to the power R.
    """
    if R == 0:
        return 0.0
    return R * fit_almost_submultiplicative_log(sigma, eps / R, n_max)


def check_product_inequality(
    a: AlgebraElement,
    b: AlgebraElement,
    sigma: GrowthFunction,
    R: float,
    table: LengthTable,
    eps: float | None = None,
    c_log: float | None = None,
    report: CheckReport | None = None,
) -> CheckReport:
    """||ab||_R <= ||a||_R ||b||_R, or with ``eps`` the almost-submultiplicative
    form ||ab||_R <= c ||a||_{R+eps} ||b||_{R+eps}.
    """
    ab = convolve(a, b)
    top = _max_len(table, a, b)
    if report is None:
        report = CheckReport("product" if eps is None else f"product-almost(eps={eps:g})")
    lhs = weighted_l1(ab, sigma, R, table)
    if eps is None:
        if not check_submultiplicative(sigma, 2 * top).holds:
            raise PreconditionError(f"{sigma} is not submultiplicative up to {2 * top}")
        rhs = weighted_l1(a, sigma, R, table) * weighted_l1(b, sigma, R, table)
        report.leq(lhs, rhs)
    else:
        if c_log is None:
            c_log = almost_constant_log(sigma, R, eps, 2 * top)
        rhs = LogValue(c_log) * weighted_l1(a, sigma, R + eps, table) * weighted_l1(b, sigma, R + eps, table)
        report.leq(lhs, rhs)
    return report


def check_coproduct_identity(
    a: AlgebraElement, sigma: GrowthFunction, R: float, table: LengthTable, report=None
) -> CheckReport:
    from .algebra import coproduct

    report = report or CheckReport("coproduct-norm")
    report.eq(tensor_norm(coproduct(a), sigma, R, table), weighted_l1(a, sigma, 2 * R, table))
    return report


def check_schauder_identity(a: AlgebraElement, spec: NormSpec, report=None) -> CheckReport:
    report = report or CheckReport("schauder")
    report.eq(schauder_sum(a, spec), norm(a, spec))
    return report


def check_bimodule_estimate(
    a: AlgebraElement,
    b: AlgebraElement,
    sigma: GrowthFunction,
    R: float,
    table: LengthTable,
    eps: float | None = None,
    c_log: float | None = None,
    report: CheckReport | None = None,
) -> CheckReport:
    """Coefficient bounds for ab and ba with b measured in the dual sup norm.

    Sub mode (``eps is None``):
      |(ab)_h| <= sigma(L(h))^R ||a||_R ||b||_{inf,-R} and the same for ba,
      plus ||ab||_{inf,-R}, ||ba||_{inf,-R} <= ||a||_R ||b||_{inf,-R}.
    Almost mode: |(ab)_h| <= c sigma(L(h))^(R+eps) ||a||_{R+eps} ||b||_{inf,-R}.
    Both modes check the sharp bound at the unit and the antipode isometry.
    """
    report = report or CheckReport("bimodule" if eps is None else f"bimodule-almost(eps={eps:g})")
    ab, ba = convolve(a, b), convolve(b, a)
    b_dual = weighted_sup(b, sigma, -R, table)
    top = max(_max_len(table, a, b), _max_len(table, ab, ba))
    sl = sigma.logs(top)
    if eps is None:
        if not check_submultiplicative(sigma, top).holds:
            raise PreconditionError(f"{sigma} is not submultiplicative up to {top}")
        a_norm = weighted_l1(a, sigma, R, table)
        scale, exponent = a_norm * b_dual, R
    else:
        if c_log is None:
            c_log = almost_constant_log(sigma, R, eps, top)
        a_norm = weighted_l1(a, sigma, R + eps, table)
        scale, exponent = LogValue(c_log) * a_norm * b_dual, R + eps
    for prod in (ab, ba):
        for h, c in prod.coeffs.items():
            bound = LogValue(exponent * sl[table.length(h)]) * scale
            report.leq(LogValue.of(abs(c)), bound, context=table.spec.format(h))
    if eps is None:
        report.leq(weighted_sup(ab, sigma, -R, table), a_norm * b_dual, context="||ab||_inf")
        report.leq(weighted_sup(ba, sigma, -R, table), a_norm * b_dual, context="||ba||_inf")
    sharp = weighted_l1(a, sigma, R, table) * b_dual
    e = table.spec.identity()
    report.leq(LogValue.of(abs(ab[e])), sharp, context="(ab)_e")
    report.leq(LogValue.of(abs(ba[e])), sharp, context="(ba)_e")
    report.eq(weighted_sup(antipode(b), sigma, -R, table), b_dual, context="antipode")
    return report


def c0_tail_profile(b: AlgebraElement, sigma: GrowthFunction, R: float, table: LengthTable) -> np.ndarray:
    """Per-shell sup of |b_g| / sigma(L(g))^R over shells 0..radius."""
    profile = np.zeros(table.radius + 1)
    if not b.coeffs:
        return profile
    L = _lengths(b, table)
    sl = sigma.logs(table.radius)
    vals = np.exp(_log_abs(b) - R * sl[L])
    np.maximum.at(profile, L, vals)
    return profile


def check_c0_closure(
    a: AlgebraElement,
    b: AlgebraElement,
    sigma: GrowthFunction,
    R: float,
    table: LengthTable,
    eps: float,
    report: CheckReport | None = None,
) -> CheckReport:
    """Finite form of the closure of the vanishing-at-infinity subspace.

    With K the coefficients of b above ``eps`` (relative to sigma^R), K~ a
    smallest head of a whose weighted tail is below ``eps``, and K' = K~ K
    (resp. K K~ for ba), every h outside K' satisfies
    |(ab)_h| / sigma(L(h))^R <= eps (||b||_{inf,-R} + ||a||_R).
    """
    report = report or CheckReport(f"c0-closure(eps={eps:g})")
    spec = table.spec
    sl = sigma.logs(table.radius)
    K = {g for g, c in b.coeffs.items() if abs(c) * math.exp(-R * sl[table.length(g)]) >= eps}
    weights = sorted(
        ((abs(c) * math.exp(R * sl[table.length(g)]), g) for g, c in a.coeffs.items()),
        key=lambda t: (-t[0], spec.sort_key(t[1])),
    )
    tail = math.fsum(w for w, _ in weights)
    K_tilde = set()
    for w, g in weights:
        if tail < eps:
            break
        K_tilde.add(g)
        tail -= w
    bound = eps * (weighted_sup(b, sigma, -R, table).value + weighted_l1(a, sigma, R, table).value)
    left_exc = {spec._mul(g, k) for g in K_tilde for k in K}
    right_exc = {spec._mul(k, g) for g in K_tilde for k in K}
    for prod, exc in ((convolve(a, b), left_exc), (convolve(b, a), right_exc)):
        for h, c in prod.coeffs.items():
            if h in exc:
                continue
            lhs = abs(c) * math.exp(-R * sl[table.length(h)])
            report.leq(LogValue.of(lhs), LogValue.of(bound), context=spec.format(h))
    report.details["excluded"] = len(left_exc | right_exc)
    return report


def check_length_chart(
    a: AlgebraElement,
    sigma: GrowthFunction,
    R: float,
    table: LengthTable,
    other: LengthTable,
    report: CheckReport | None = None,
) -> CheckReport:
    """||a||_{L,sigma,R} <= ||a||_{L',sigma,cR} with c = max L/L' on the tables."""
    report = report or CheckReport("length-chart")
    c = length_ratio(table, other)
    report.details["c"] = c
    report.leq(weighted_l1(a, sigma, R, table), weighted_l1(a, sigma, c * R, other))
    return report


def length_ratio(table: LengthTable, other: LengthTable) -> int:
    """Smallest integer c with L(g) <= c L'(g) over elements in both tables."""
    c = 1
    for g, n in table.lengths.items():
        m = other.lengths.get(g)
        if m:
            c = max(c, math.ceil(n / m))
    return c


def norms_csv(rows: list[dict]) -> str:
    out = io.StringIO()
    if not rows:
        return ""
    w = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return out.getvalue()

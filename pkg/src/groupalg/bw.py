"""Recursive seminorms built from the scaling c(g) = (L(g)!)^rho.

    h_{0,0,g}      = |a_g| c(g)
    h_{m+1,2l,k}   = sum_g h_{m,l,g}^2 c(k) / (c(g) c(g^{-1} k))
    h_{m+1,2l+1,k} = h_{m+1,2l,k^{-1}}
    ||a||_{m,l,k}  = h_{m,l,k}^{1 / 2^m}

Levels 0 and 1 are finite sums.  From level 2 on the g-sum runs over the
whole group; it is truncated to the ball of the length table and every value
carries a relative error bound made of the propagated truncation errors of
the previous level plus an extrapolated tail over the shells beyond the
ball.  Free groups with their standard generators have an exact shortcut for
m <= 2 that sums shell families in closed form (see ``_TreeLevel2``).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from .algebra import AlgebraElement, random_element
from .ball import LengthTable, OutOfBall, _sphere_counts_exact, exact_length, enumerate_ball
from .groups import FreeGroup
from .growth import Factorial
from .logvalue import EQ_TOL, LogValue
from .norms import PreconditionError, weighted_l1

logger = logging.getLogger(__name__)

TAIL_FRACTION = 1e-6
MAX_DEPTH = 4
_TAIL_SHELLS = 400
_DIST_CACHE_LIMIT = 4000


class TailNotNegligible(RuntimeError):
    def __init__(self, fraction: float, limit: float):
        super().__init__(f"tail bound {fraction:.3g} exceeds {limit:g} of the truncated value")
        self.fraction = fraction
        self.limit = limit


@dataclass(frozen=True)
class BWConfig:
    rho: float
    m: int
    ell: int = 0
    k: object = None
    radius: int | None = None
    tail_fraction: float = TAIL_FRACTION
    max_depth: int = MAX_DEPTH

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if self.m < 0 or self.m > self.max_depth:
            raise ValueError(f"depth m must lie in 0..{self.max_depth}")
        if not 0 <= self.ell < 2**self.m:
            raise ValueError(f"index must lie in 0..{2**self.m - 1} at depth {self.m}")


@dataclass(frozen=True)
class HValue:
    """A truncated h value; the true value lies in [value, value * (1 + tail_bound)]."""

    value: LogValue
    tail_bound: float = 0.0

    @property
    def exact(self) -> bool:
        return self.tail_bound == 0.0


def _logc(n, rho: float):
    return rho * gammaln(np.asarray(n, dtype=float) + 1)


def scaling_log(table: LengthTable, g, rho: float) -> LogValue:
    """log c(g) = rho * log(L(g)!)."""
    return LogValue(float(_logc(table.length(g), rho)))


class BWEvaluator:
    """h values for one group ball and one rho; reusable across elements."""

    def __init__(self, table: LengthTable, rho: float, tail_fraction: float = TAIL_FRACTION, length=None):
        if not rho > 0:
            raise ValueError("rho must be positive")
        self.table = table
        self.spec = table.spec
        self.rho = float(rho)
        self.tail_fraction = tail_fraction
        self.N = table.radius
        self.elements = table.elements
        self.index = table.index
        self.lengths = table.length_array
        self.logc = _logc(self.lengths, self.rho)
        self._length = length or exact_length(self.spec)
        self._big_table = None
        self._dist = None
        inv = self.spec._inv
        self.inv_index = np.array([self.index[inv(g)] for g in self.elements])
        self._shell_counts = None
        self._logc_cache = None
        self._tree = isinstance(self.spec, FreeGroup) and self.spec.uses_default_generators

    # lengths of g^{-1} k, possibly outside the ball
    def _len(self, g) -> int:
        if self._length is not None:
            return self._length(g)
        if g in self.index:
            return int(self.lengths[self.index[g]])
        if self._big_table is None:
            self._big_table = enumerate_ball(self.spec, 2 * self.N)
        return self._big_table.length(g)

    def _dist_rows(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        if self._dist is None and len(self.elements) <= _DIST_CACHE_LIMIT:
            n = len(self.elements)
            self._dist = self._pairwise(np.arange(n), np.arange(n))
        if self._dist is not None:
            return self._dist[np.ix_(rows, cols)]
        return self._pairwise(rows, cols)

    def _pairwise(self, rows, cols) -> np.ndarray:
        mul, inv, E = self.spec._mul, self.spec._inv, self.elements
        out = np.empty((len(rows), len(cols)), dtype=np.int32)
        invs = [inv(E[j]) for j in cols]
        for a, i in enumerate(rows):
            k = E[i]
            out[a] = [self._len(mul(gi, k)) for gi in invs]
        return out

    def _logc_int(self, D: np.ndarray) -> np.ndarray:
        top = int(D.max()) if D.size else 0
        if self._logc_cache is None or len(self._logc_cache) <= top:
            self._logc_cache = _logc(np.arange(max(top + 1, 2 * self.N + 1)), self.rho)
        return self._logc_cache[D]

    def _sigma_beyond(self, n_max: int) -> np.ndarray:
        """log sigma_G(n) for n = 0..n_max, extrapolated past the ball."""
        if self._shell_counts is None or len(self._shell_counts) <= n_max:
            exact = _sphere_counts_exact(self.spec, n_max)
            if exact is not None:
                counts = np.array(exact, dtype=float)
            else:
                base = np.array(self.table.sigma, dtype=float)
                ratio = base[-1] / base[-2] if len(base) > 1 and base[-2] > 0 else 1.0
                extra = base[-1] * ratio ** np.arange(1, n_max - self.N + 1)
                counts = np.concatenate([base, extra])
            with np.errstate(divide="ignore"):
                self._shell_counts = np.log(counts)
        return self._shell_counts[: n_max + 1]

    # level arrays over the ball

    def _level0(self, a: AlgebraElement) -> tuple[np.ndarray, np.ndarray]:
        logs = np.full(len(self.elements), -np.inf)
        for g, x in a.coeffs.items():
            if g not in self.index:
                raise OutOfBall(g, self.N)
            i = self.index[g]
            logs[i] = math.log(abs(x)) + self.logc[i]
        return logs, np.zeros(len(logs))

    def _step(self, prev, rows: np.ndarray, exact: bool) -> tuple[np.ndarray, np.ndarray]:
        logs, rel = prev
        cols = np.flatnonzero(np.isfinite(logs))
        if len(cols) == 0:
            return np.full(len(rows), -np.inf), np.zeros(len(rows))
        D = self._dist_rows(rows, cols)
        T = (
            2 * logs[cols][None, :]
            + self.logc[rows][:, None]
            - self.logc[cols][None, :]
            - self._logc_int(D)
        )
        val = logsumexp(T, axis=1)
        grow = (1 + rel[cols]) ** 2 - 1
        prop = np.exp(T - val[:, None]) @ grow if np.any(grow) else np.zeros(len(rows))
        if exact:
            return val, prop
        tail = self._tail(prev, rows, val)
        return val, prop + tail

    def _tail(self, prev, rows, val) -> np.ndarray:
        """Relative size of the g-sum over shells N+1, N+2, ...

        Uses the shell maxima of h_{m,l,.}^2 (with their own error bounds),
        extrapolated with a slope that grows like log n, the lower bound
        L(g^{-1} k) >= L(g) - L(k) in the denominator, and sigma_G beyond
        the ball.  This is an estimate, not a proof.
        """
        logs, rel = prev
        N = self.N
        f = 2 * (logs + np.log1p(rel))
        shell_max = np.full(N + 1, -np.inf)
        np.maximum.at(shell_max, self.lengths, f)
        if not np.isfinite(shell_max[N]):
            return np.zeros(len(rows))
        s1 = shell_max[N] - shell_max[N - 1] if N >= 1 and np.isfinite(shell_max[N - 1]) else 0.0
        s1 = max(s1, 0.0)
        js = np.arange(1, _TAIL_SHELLS + 1)
        n = N + js
        scale = np.log(n) / math.log(max(N, 2))
        F = shell_max[N] + s1 * np.cumsum(scale)
        logsig = self._sigma_beyond(N + _TAIL_SHELLS)[N + 1 :]
        base = logsig + F - _logc(n, self.rho)
        Lk = self.lengths[rows]
        uniq, inv = np.unique(Lk, return_inverse=True)
        terms = base[None, :] - _logc(np.maximum(n[None, :] - uniq[:, None], 0), self.rho)
        total = logsumexp(terms, axis=1)[inv]
        bad = (terms[:, -1] > terms[:, -2])[inv]
        extra = self.logc[rows] - val
        out = np.exp(total + extra)
        out[bad | (terms[inv, -1] + extra > -40)] = math.inf
        return out

    def _full(self, a, memo, m: int, ell: int):
        key = (m, ell)
        if key in memo:
            return memo[key]
        if m == 0:
            res = self._level0(a)
        elif ell % 2:
            logs, rel = self._full(a, memo, m, ell - 1)
            res = logs[self.inv_index], rel[self.inv_index]
        else:
            prev = self._full(a, memo, m - 1, ell // 2)
            res = self._step(prev, np.arange(len(self.elements)), exact=(m == 1))
        memo[key] = res
        return res

    def h_logs(self, a: AlgebraElement, m: int, ell: int, ks: list, memo=None) -> tuple[np.ndarray, np.ndarray]:
        """log h_{m,ell,k}(a) and relative error bounds for each k in ``ks``."""
        if a.spec != self.spec:
            raise ValueError("element and table live in different groups")
        memo = {} if memo is None else memo
        if not a.coeffs:
            return np.full(len(ks), -np.inf), np.zeros(len(ks))
        if m == 0:
            logs = np.array([math.log(abs(a[k])) + float(_logc(self._len(k), self.rho)) if a[k] != 0 else -np.inf for k in ks])
            return logs, np.zeros(len(ks))
        # the tree quotient needs level-1 values at ell = 0 (see _TreeLevel2)
        if self._tree and (m == 1 or (m == 2 and ell < 2)):
            return _TreeLevel2(self, a).h_logs(m, ell, ks)
        rows = []
        for k in ks:
            if k not in self.index:
                raise OutOfBall(k, self.N)
            rows.append(self.index[k])
        rows = np.array(rows, dtype=int)
        if ell % 2:
            rows, ell = self.inv_index[rows], ell - 1
        prev = self._full(a, memo, m - 1, ell // 2)
        return self._step(prev, rows, exact=(m == 1))

    def h_value(self, a: AlgebraElement, cfg: BWConfig, k=None, check_tail: bool = True) -> HValue:
        k = cfg.k if k is None else k
        k = self.spec.identity() if k is None else self.spec._coerce(k)
        logs, rel = self.h_logs(a, cfg.m, cfg.ell, [k])
        out = HValue(LogValue(float(logs[0])), float(rel[0]))
        limit = cfg.tail_fraction if cfg.tail_fraction is not None else self.tail_fraction
        if check_tail and out.tail_bound > limit:
            raise TailNotNegligible(out.tail_bound, limit)
        return out

    def seminorm(self, a: AlgebraElement, cfg: BWConfig, k=None, check_tail: bool = True) -> HValue:
        h = self.h_value(a, cfg, k, check_tail)
        p = 2**cfg.m
        # (1 + t)^{1/p} - 1 <= t / p
        return HValue(LogValue(h.value.log / p), h.tail_bound / p)


class _TreeLevel2:
    """Exact h values of depth <= 2 on a free group with standard generators.

    The Cayley graph is a tree.  Let T be the set of all prefixes of the
    words in supp(a) together with e and k.  A vertex outside T leaves T at
    some node v through one of the free(v) branches not in T and then goes
    on for j further letters; its distance to any node w of T is
    d(v, w) + 1 + j, and there are free(v) (2r-1)^j such vertices.  So the
    level-2 sum over G splits into finitely many one-parameter series in j,
    summed up to length 60 past the truncation radius and closed with a
    geometric bound from the last term ratio.

    Only indices 0 and 1 at depth 2 reduce this way: index 2 and 3 square
    h_{1,1,g} = h_{1,0,g^-1}, which depends on suffixes of g rather than on
    its position in the tree relative to T.
    """

    def __init__(self, ev: BWEvaluator, a: AlgebraElement):
        self.ev = ev
        self.a = a
        self.rho = ev.rho
        self.r2 = 2 * ev.spec.rank
        self.J = max(ev.N, 8) + 60

    def _nodes(self, points) -> list:
        nodes = {()}
        for w in points:
            for i in range(1, len(w) + 1):
                nodes.add(tuple(w[:i]))
        return sorted(nodes, key=lambda w: (len(w), w))

    @staticmethod
    def _d(v, w) -> int:
        p = 0
        for x, y in zip(v, w):
            if x != y:
                break
            p += 1
        return len(v) + len(w) - 2 * p

    def _h1_at(self, dists: np.ndarray, length: np.ndarray) -> np.ndarray:
        """log h_1(g) for vertices with the given distances to supp(a) (one row per support point)."""
        rho = self.rho
        out = np.full(length.shape, -np.inf)
        for (w, x), d in zip(self.a.coeffs.items(), dists):
            t = 2 * math.log(abs(x)) + _logc(len(w), rho) + _logc(length, rho) - _logc(d, rho)
            out = np.logaddexp(out, t)
        return out

    def h_logs(self, m: int, ell: int, ks: list):
        vals, rels = [], []
        for k in ks:
            k = tuple(k)
            if ell % 2:
                k = tuple(-x for x in reversed(k))
            v, r = self._one(m, k)
            vals.append(v)
            rels.append(r)
        return np.array(vals), np.array(rels)

    def _one(self, m: int, k) -> tuple[float, float]:
        rho = self.rho
        supp = list(self.a.coeffs)
        if m == 1:
            terms = [
                2 * math.log(abs(x)) + _logc(len(w), rho) + _logc(len(k), rho) - _logc(self._d(w, k), rho)
                for w, x in self.a.coeffs.items()
            ]
            return float(logsumexp(terms)), 0.0
        nodes = self._nodes(supp + [k])
        node_set = set(nodes)
        logck = float(_logc(len(k), rho))
        parts = []
        for v in nodes:
            dv = np.array([self._d(v, w) for w in supp])
            h1 = self._h1_at(dv[:, None], np.array([len(v)]))[0]
            parts.append(2 * h1 + logck - _logc(len(v), rho) - _logc(self._d(v, k), rho))
        total = float(logsumexp(parts))
        tail = -np.inf
        j = np.arange(self.J + 1)
        for v in nodes:
            children = sum(1 for x in range(-self.r2 // 2, self.r2 // 2 + 1) if x and v + (x,) in node_set)
            free = self.r2 - children - (1 if v else 0)
            if free <= 0:
                continue
            dv = np.array([self._d(v, w) for w in supp])
            length = len(v) + 1 + j
            h1 = self._h1_at(dv[:, None] + 1 + j[None, :], length)
            terms = (
                math.log(free)
                + j * math.log(self.r2 - 1)
                + 2 * h1
                + logck
                - _logc(length, rho)
                - _logc(self._d(v, k) + 1 + j, rho)
            )
            total = float(np.logaddexp(total, logsumexp(terms)))
            q = math.exp(terms[-1] - terms[-2])
            tail = np.logaddexp(tail, terms[-1] + math.log(q / (1 - q)) if q < 1 else math.inf)
        return total, float(math.exp(tail - total))


def bw_seminorm(a: AlgebraElement, cfg: BWConfig, table: LengthTable, evaluator: BWEvaluator | None = None) -> HValue:
    ev = evaluator or BWEvaluator(table, cfg.rho, cfg.tail_fraction)
    return ev.seminorm(a, cfg)


def h_value(a: AlgebraElement, cfg: BWConfig, table: LengthTable, evaluator: BWEvaluator | None = None) -> HValue:
    ev = evaluator or BWEvaluator(table, cfg.rho, cfg.tail_fraction)
    return ev.h_value(a, cfg)


# comparison with the factorial-weighted l1 norms

@dataclass
class ComparisonReport:
    rho: float
    m: int
    checks: int = 0
    violations: list = field(default_factory=list)
    worst_tail: float = 0.0

    @property
    def holds(self) -> bool:
        return not self.violations


def check_pointwise(ev: BWEvaluator, a: AlgebraElement, m: int, report: ComparisonReport | None = None) -> ComparisonReport:
    """|a_g| <= (L(g)!)^{rho (2^{-m} - 1)} ||a||_{m+1,0,e} for every g in supp(a).

    The truncated seminorm is a lower bound for the true one, so a check that
    passes with it also passes with the exact value.
    """
    report = report or ComparisonReport(ev.rho, m)
    e = ev.spec.identity()
    logs, rel = ev.h_logs(a, m + 1, 0, [e])
    norm_log = logs[0] / 2 ** (m + 1)
    report.worst_tail = max(report.worst_tail, float(rel[0]))
    for g, x in a.coeffs.items():
        lhs = math.log(abs(x))
        rhs = ev.rho * (2.0**-m - 1) * float(gammaln(ev._len(g) + 1)) + norm_log
        report.checks += 1
        if lhs > rhs + EQ_TOL * max(1.0, abs(lhs), abs(rhs)):
            report.violations.append({"g": ev.spec.format(g), "lhs": lhs, "rhs": rhs})
    return report


@dataclass
class FittedConstant:
    name: str
    c_small: float
    c_large: float
    samples: tuple
    worst_tail: float

    @property
    def change(self) -> float:
        return abs(self.c_large - self.c_small) / self.c_small

    @property
    def stable(self) -> bool:
        return self.change < 0.05

    def to_json(self) -> dict:
        return {
            "c": self.c_large,
            "c_half_samples": self.c_small,
            "samples": list(self.samples),
            "relative_change": self.change,
            "stable": self.stable,
            "worst_tail_bound": self.worst_tail,
        }


def sample_elements(rng: np.random.Generator, spec, pool: list, count: int, max_terms: int = 5) -> list:
    return [random_element(rng, pool, spec, max_terms=max_terms) for _ in range(count)]


def fit_upper_constant(ev: BWEvaluator, samples: list, m: int, R: float) -> tuple[float, float]:
    """max over samples of ||a||_{L,Factorial,R} / ||a||_{m,0,e} (log) and the worst tail bound."""
    if not R < ev.rho:
        raise PreconditionError(f"need R < rho, got R={R}, rho={ev.rho}")
    e = ev.spec.identity()
    best, worst = -math.inf, 0.0
    sigma = Factorial()
    for a in samples:
        logs, rel = ev.h_logs(a, m, 0, [e])
        lhs = weighted_l1(a, sigma, R, ev.table).log
        best = max(best, lhs - logs[0] / 2**m)
        worst = max(worst, float(rel[0]))
    return best, worst


def fit_decay_constant(ev: BWEvaluator, samples: list, m: int, eps: float, ks: list, ell: int = 0) -> tuple[float, float]:
    """max over samples and k of h_{m,ell,k}(a) (L(k)!)^{-4^m eps} ||a||_{L,Factorial,rho-eps}^{-2^m} (log)."""
    if not 0 < eps < 4.0**-m * ev.rho:
        raise PreconditionError(f"need 0 < eps < 4^-m rho = {4.0**-m * ev.rho:g}, got {eps}")
    sigma = Factorial()
    Lk = np.array([ev._len(k) for k in ks], dtype=float)
    best, worst = -math.inf, 0.0
    for a in samples:
        logs, rel = ev.h_logs(a, m, ell, ks)
        base = weighted_l1(a, sigma, ev.rho - eps, ev.table).log
        vals = logs - 4.0**m * eps * gammaln(Lk + 1) - 2**m * base
        best = max(best, float(np.max(vals)))
        worst = max(worst, float(np.max(rel)))
    return best, worst


def verify_comparison(
    table: LengthTable,
    rho: float,
    m: int,
    eps: float,
    R: float,
    seed: int = 42,
    samples: int = 64,
    pool_radius: int = 3,
    k_radius: int = 2,
    evaluator: BWEvaluator | None = None,
    include_basis: bool = True,
) -> dict:
    """Pointwise bound (i) on every sample, and fitted constants for (ii) and
    (iii) with ``samples`` and then twice as many elements drawn from the same
    seeded stream.

    With ``include_basis`` both sample sets also contain e_g for every g in
    the pool.  For (iii) this is where the supremum sits: h^{1/2^m} is a
    seminorm, so h(a)^{1/2^m} <= sum |a_g| h(e_g)^{1/2^m} and the ratio to a
    weighted l1 norm is largest at a basis element.
    """
    ev = evaluator or BWEvaluator(table, rho)
    rng = np.random.default_rng(seed)
    pool = [g for g in table.elements if table.length(g) <= pool_radius]
    basis = [AlgebraElement.basis(table.spec, g) for g in pool] if include_basis else []
    first = basis + sample_elements(rng, table.spec, pool, samples)
    both = first + sample_elements(rng, table.spec, pool, samples)
    ks = [g for g in table.elements if table.length(g) <= k_radius]

    pointwise = ComparisonReport(rho, m)
    for a in both:
        check_pointwise(ev, a, m, pointwise)

    u_small, t1 = fit_upper_constant(ev, first, m, R)
    u_large, t2 = fit_upper_constant(ev, both, m, R)
    d_small, t3 = fit_decay_constant(ev, first, m, eps, ks)
    d_large, t4 = fit_decay_constant(ev, both, m, eps, ks)
    sizes = (len(first), len(both))
    upper = FittedConstant("upper", math.exp(u_small), math.exp(u_large), sizes, max(t1, t2))
    decay = FittedConstant("decay", math.exp(d_small), math.exp(d_large), sizes, max(t3, t4))
    worst = max(pointwise.worst_tail, upper.worst_tail, decay.worst_tail)
    return {
        "rho": rho,
        "m": m,
        "eps": eps,
        "R": R,
        "seed": seed,
        "truncation": table.radius,
        "basis_elements_included": include_basis,
        "pointwise": {
            "checks": pointwise.checks,
            "violations": pointwise.violations,
            "holds": pointwise.holds,
        },
        "fitted_constants": {"upper": upper.to_json(), "decay": decay.to_json()},
        "worst_tail_bound": worst,
        "tail_ok": worst <= ev.tail_fraction,
    }


def bw_report(a: AlgebraElement, cfg: BWConfig, table: LengthTable, ks: list | None = None, evaluator=None) -> dict:
    """Seminorm values at several base points (default: the whole ball)."""
    ev = evaluator or BWEvaluator(table, cfg.rho, cfg.tail_fraction)
    ks = list(table.elements) if ks is None else ks
    logs, rel = ev.h_logs(a, cfg.m, cfg.ell, ks)
    p = 2**cfg.m
    return {
        "rho": cfg.rho,
        "m": cfg.m,
        "ell": cfg.ell,
        "truncation": table.radius,
        "base_points": [table.spec.format(k) for k in ks],
        "values": [None if not np.isfinite(x) and x > 0 else float(np.exp(x / p)) for x in logs],
        "log_values": [float(x / p) if np.isfinite(x) else None for x in logs],
        "tail_bounds": [float(r / p) for r in rel],
        "fitted_constants": {},
    }

"""Growth functions evaluated in log space, submultiplicativity checks and
the comparison relation ``sigma [= sigma'`` (``sigma(n) <= c sigma'(cn)^k``).
"""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .logvalue import GROWTH_TOL, LogValue

logger = logging.getLogger(__name__)


class GrowthFunction:
    """Base class; subclasses implement ``_raw_log(n)`` for integer n >= 0."""

    def log(self, n: int) -> float:
        if n < 0:
            raise ValueError("growth functions are defined on n >= 0")
        return self._raw_log(n)

    def eval_log(self, n: int) -> LogValue:
        return LogValue(self.log(n))

    def logs(self, n_max: int) -> np.ndarray:
        return np.array([self.log(n) for n in range(n_max + 1)])

    def __call__(self, n: int) -> float:
        return math.exp(self.log(n))


@dataclass(frozen=True)
class Polynomial(GrowthFunction):
    """``a_d n^d + ... + a_1 n + 1``; ``coeffs`` are listed from ``a_d`` down to ``a_1``."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(float(x) for x in self.coeffs)
        while c and c[0] == 0:
            c = c[1:]
        if not c:
            raise ValueError("polynomial growth needs a positive leading coefficient")
        if any(x < 0 for x in c):
            raise ValueError("polynomial growth coefficients must be nonnegative")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def _raw_log(self, n):
        acc = 0.0
        for a in self.coeffs:
            acc = (acc + a) * n
        return math.log1p(acc)

    def __str__(self):
        return "poly(" + ",".join(_fmt(x) for x in self.coeffs + (1.0,)) + ")"


@dataclass(frozen=True)
class SubExponential(GrowthFunction):
    """``exp(n^theta)``; exponential growth at ``theta = 1``."""

    theta: float

    def __post_init__(self):
        if not 0 < self.theta <= 1:
            raise ValueError("theta must lie in (0, 1]")

    def _raw_log(self, n):
        return float(n) ** self.theta

    def __str__(self):
        return f"subexp({_fmt(self.theta)})"


@dataclass(frozen=True)
class Factorial(GrowthFunction):
    def _raw_log(self, n):
        return math.lgamma(n + 1)

    def __str__(self):
        return "factorial"


@dataclass(frozen=True)
class SubFactorial(GrowthFunction):
    """``(n^theta)! = Gamma(n^theta + 1)``, clamped to stay monotone."""

    theta: float

    def __post_init__(self):
        if not 0 < self.theta <= 1:
            raise ValueError("theta must lie in (0, 1]")

    def _raw_log(self, n):
        return _subfact_log(self.theta, n)

    def __str__(self):
        return f"subfact({_fmt(self.theta)})"


@lru_cache(maxsize=None)
def _subfact_log(theta: float, n: int) -> float:
    v = math.lgamma(float(n) ** theta + 1)
    if n > 0:
        prev = _subfact_log(theta, n - 1)
        if v < prev:
            logger.info("subfact(%g): clamping n=%d from %.3g to %.3g", theta, n, v, prev)
            v = prev
    return max(v, 0.0)


@dataclass(frozen=True)
class Power(GrowthFunction):
    base: GrowthFunction
    d: float

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError("power exponent must be positive")

    def _raw_log(self, n):
        return self.d * self.base.log(n)

    def __str__(self):
        return f"pow({self.base},{_fmt(self.d)})"


@dataclass(frozen=True)
class Product(GrowthFunction):
    f: GrowthFunction
    g: GrowthFunction

    def _raw_log(self, n):
        return self.f.log(n) + self.g.log(n)

    def __str__(self):
        return f"prod({self.f},{self.g})"


@dataclass(frozen=True)
class ScaledSum(GrowthFunction):
    """``x f + y g`` with ``x, y >= 1``."""

    x: float
    f: GrowthFunction
    y: float
    g: GrowthFunction

    def __post_init__(self):
        if self.x < 1 or self.y < 1:
            raise ValueError("scaled sums need weights >= 1")

    def _raw_log(self, n):
        return float(np.logaddexp(math.log(self.x) + self.f.log(n), math.log(self.y) + self.g.log(n)))

    def __str__(self):
        return f"sum({_fmt(self.x)},{self.f},{_fmt(self.y)},{self.g})"


@dataclass(frozen=True, eq=False)
class Sampled(GrowthFunction):
    """A tabulated function such as sigma_G or beta_G; undefined past its range."""

    values: tuple
    label: str = "sampled"

    def __post_init__(self):
        if any(v <= 0 for v in self.values):
            raise ValueError("sampled growth values must be positive")
        object.__setattr__(self, "_logs", tuple(math.log(v) for v in self.values))

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def _raw_log(self, n):
        if n > self.n_max:
            raise IndexError(f"{self.label} is only sampled up to n={self.n_max}")
        return self._logs[n]

    def __str__(self):
        return self.label


def _fmt(x: float) -> str:
    return f"{x:g}"


# parsing

_TOKEN = re.compile(r"\s*([A-Za-z_]+|[-+]?\d*\.?\d+(?:[eE][-+]?\d+)?|[(),])")


def parse_growth(text: str) -> GrowthFunction:
    """Parse ``poly(1,1)``, ``subexp(0.5)``, ``factorial``, ``subfact(0.5)``,
    ``pow(f,d)``, ``prod(f,g)`` and ``sum(x,f,y,g)``.

    Polynomial coefficients are written from the leading one down to the
    constant term, which must be 1: ``poly(1,1)`` is ``n + 1``.
    """
    tokens = [t for t in _TOKEN.findall(text)]
    if "".join(tokens).replace(" ", "") != text.replace(" ", ""):
        raise ValueError(f"cannot tokenize growth expression {text!r}")
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise ValueError(f"expected {expected!r} in {text!r}, got {tok!r}")
        pos += 1
        return tok

    def number():
        return float(take())

    def expr() -> GrowthFunction:
        name = take().lower()
        if name in ("factorial", "fact"):
            return Factorial()
        if name in ("linear",):
            return Polynomial((1.0,))
        take("(")
        if name == "poly":
            nums = [number()]
            while peek() == ",":
                take(",")
                nums.append(number())
            take(")")
            if len(nums) < 2 or nums[-1] != 1:
                raise ValueError("poly(...) lists coefficients down to a constant term of 1")
            return Polynomial(tuple(nums[:-1]))
        if name in ("subexp", "exp"):
            out = SubExponential(number())
        elif name == "subfact":
            out = SubFactorial(number())
        elif name == "pow":
            base = expr()
            take(",")
            out = Power(base, number())
        elif name == "prod":
            f = expr()
            take(",")
            out = Product(f, expr())
        elif name == "sum":
            x = number()
            take(",")
            f = expr()
            take(",")
            y = number()
            take(",")
            out = ScaledSum(x, f, y, expr())
        else:
            raise ValueError(f"unknown growth function {name!r}")
        take(")")
        return out

    result = expr()
    if pos != len(tokens):
        raise ValueError(f"trailing input in growth expression {text!r}")
    return result


# submultiplicativity

def _slack(x: float) -> float:
    return GROWTH_TOL * max(1.0, abs(x))


@dataclass(frozen=True)
class SubmultVerdict:
    holds: bool
    checked_range: int
    counterexample: tuple | None = None


def check_submultiplicative(sigma: GrowthFunction, n_max: int) -> SubmultVerdict:
    """Exhaustive check of sigma(n+m) <= sigma(n) sigma(m) for n + m <= n_max."""
    lg = sigma.logs(n_max)
    for s in range(n_max + 1):
        for n in range(s // 2 + 1):
            m = s - n
            rhs = lg[n] + lg[m]
            if lg[s] > rhs + _slack(rhs):
                return SubmultVerdict(False, n_max, (n, m))
    return SubmultVerdict(True, n_max)


def fit_almost_submultiplicative(sigma: GrowthFunction, eps: float, n_max: int) -> float:
    """Smallest c >= 1 with sigma(n+m) <= c (sigma(n) sigma(m))^(1+eps) on n+m <= n_max."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return math.exp(fit_almost_submultiplicative_log(sigma, eps, n_max))


def fit_almost_submultiplicative_log(sigma: GrowthFunction, eps: float, n_max: int) -> float:
    lg = sigma.logs(n_max)
    best = 0.0
    for s in range(n_max + 1):
        n = np.arange(s + 1)
        vals = lg[s] - (1 + eps) * (lg[n] + lg[s - n])
        best = max(best, float(vals.max()))
    return best


@dataclass(frozen=True)
class StabilizedConstant:
    value: float
    n_max: int
    history: tuple = field(default=())


def stabilized_almost_constant(
    sigma: GrowthFunction, eps: float, start: int = 16, rel: float = 0.05, limit: int = 4096
) -> StabilizedConstant:
    """Double the range until the fitted constant changes by less than ``rel``."""
    n = start
    prev = fit_almost_submultiplicative(sigma, eps, n)
    history = [(n, prev)]
    while n < limit:
        n *= 2
        cur = fit_almost_submultiplicative(sigma, eps, n)
        history.append((n, cur))
        if abs(cur - prev) <= rel * prev:
            return StabilizedConstant(cur, n, tuple(history))
        prev = cur
    raise RuntimeError(f"almost-submultiplicative constant did not stabilize up to n={limit}")


# the relation sigma [= sigma'

@dataclass(frozen=True)
class GrowthWitness:
    c: int
    k: int
    checked_range: int


def _witness_holds(lg: np.ndarray, other: GrowthFunction, c: int, k: int) -> bool:
    n = len(lg) - 1
    rhs = math.log(c) + k * np.array([other.log(c * i) for i in range(n + 1)])
    return bool(np.all(lg <= rhs + GROWTH_TOL * np.maximum(1.0, np.abs(rhs))))


def check_precedes(sigma: GrowthFunction, other: GrowthFunction, c: int, k: int, n_max: int) -> bool:
    """Exhaustively test sigma(n) <= c * other(c n)^k for 0 <= n <= n_max."""
    if c < 1 or k < 1:
        raise ValueError("witness constants must be >= 1")
    return _witness_holds(sigma.logs(n_max), other, c, k)


def search_witness(
    sigma: GrowthFunction, other: GrowthFunction, c_max: int, k_max: int, n_max: int
) -> GrowthWitness | None:
    """Lexicographically least (c, k) in the integer grid that passes, or None.

    ``None`` only means "not found up to the caps" on the checked range.
    """
    return search_witness_logs(sigma.logs(n_max), other, c_max, k_max)


def search_witness_logs(
    lhs_logs: np.ndarray, other: GrowthFunction, c_max: int, k_max: int
) -> GrowthWitness | None:
    """Witness search for a tabulated left-hand side given by its logs (-inf for 0)."""
    n_max = len(lhs_logs) - 1
    for c in range(1, c_max + 1):
        if isinstance(other, Sampled) and c * n_max > other.n_max:
            continue
        other_logs = np.array([other.log(c * i) for i in range(n_max + 1)])
        for k in range(1, k_max + 1):
            rhs = math.log(c) + k * other_logs
            if np.all(lhs_logs <= rhs + GROWTH_TOL * np.maximum(1.0, np.abs(rhs))):
                return GrowthWitness(c, k, n_max)
    return None


# symbolic comparison

def growth_class(sigma: GrowthFunction):
    """Class key ordered by the relation, or None if no rule applies.

    Polynomials share one class; exp(n^t) and (n^t)! interleave as
    exp(n^t) < (n^t)! < exp(n^t') for t < t'.
    """
    if isinstance(sigma, Polynomial):
        return (0, 0.0, 0)
    if isinstance(sigma, SubExponential):
        return (1, sigma.theta, 0)
    if isinstance(sigma, Factorial):
        return (1, 1.0, 1)
    if isinstance(sigma, SubFactorial):
        return (1, sigma.theta, 1)
    if isinstance(sigma, Power):
        # sigma ~ sigma^d for every d > 0
        return growth_class(sigma.base)
    if isinstance(sigma, (Product, ScaledSum)):
        a, b = growth_class(sigma.f), growth_class(sigma.g)
        if a is None or b is None:
            return None
        return max(a, b, key=_class_sort)
    return None


def _class_sort(key):
    return (key[0], round(key[1], 12), key[2])


def symbolic_compare(sigma: GrowthFunction, other: GrowthFunction) -> str:
    """One of ``precedes``, ``succeeds``, ``equivalent`` or ``unknown``."""
    a, b = growth_class(sigma), growth_class(other)
    if a is None or b is None:
        return "unknown"
    ka, kb = _class_sort(a), _class_sort(b)
    if ka == kb:
        return "equivalent"
    return "precedes" if ka < kb else "succeeds"


def group_growth_function(kind: tuple[str, int]) -> GrowthFunction | None:
    """Catalog representative of a group's growth class (None when bounded)."""
    name, degree = kind
    if name == "poly":
        return Polynomial((1.0,) + (0.0,) * (degree - 1))
    if name == "exp":
        return SubExponential(1.0)
    return None


def beta_precedes_symbolic(kind: tuple[str, int], sigma: GrowthFunction) -> bool | None:
    """Decide beta_G [= sigma from the group's growth class, if a rule applies."""
    rep = group_growth_function(kind)
    if rep is None:
        return True
    verdict = symbolic_compare(rep, sigma)
    if verdict == "unknown":
        return None
    return verdict in ("precedes", "equivalent")


def inverse_summable_exponent(witness: GrowthWitness) -> int:
    """Integer p with sum sigma(n)^{-p} finite, given (1+n) [= sigma via ``witness``.

    From 1+n <= c sigma(cn)^k and monotonicity, sigma(m)^{-1} <= (c^2/m)^{1/k}
    for m >= c, so any p > k works; we return 2k.
    """
    return 2 * witness.k


def partial_sums_inverse_power(sigma: GrowthFunction, p: float, n_max: int) -> np.ndarray:
    return np.cumsum(np.exp(-p * sigma.logs(n_max)))


def as_sampled(values: Sequence[int], label: str) -> Sampled:
    return Sampled(tuple(int(v) for v in values), label)

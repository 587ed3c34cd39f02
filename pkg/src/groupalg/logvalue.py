"""Nonnegative quantities stored by their natural logarithm.

Factorial weights overflow double precision long before the balls we
enumerate get interesting, so every norm and growth value in the package
travels as a :class:`LogValue`.  Zero is represented by ``log = -inf``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

# equality claims are checked at this relative slack on log-magnitudes
EQ_TOL = 1e-9
# growth-function comparisons use the tighter one
GROWTH_TOL = 1e-12


@dataclass(frozen=True, order=False)
class LogValue:
    log: float = -math.inf

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(-math.inf)

    @classmethod
    def one(cls) -> "LogValue":
        return cls(0.0)

    @classmethod
    def of(cls, x: float) -> "LogValue":
        if x < 0:
            raise ValueError(f"LogValue needs a nonnegative number, got {x}")
        return cls(math.log(x)) if x > 0 else cls.zero()

    @property
    def is_zero(self) -> bool:
        return self.log == -math.inf

    @property
    def value(self) -> float:
        """Plain float; ``inf`` once the magnitude leaves the double range."""
        if self.log > 709.0:
            return math.inf
        return math.exp(self.log)

    def __mul__(self, other: "LogValue") -> "LogValue":
        if self.is_zero or other.is_zero:
            return LogValue.zero()
        return LogValue(self.log + other.log)

    def __truediv__(self, other: "LogValue") -> "LogValue":
        if other.is_zero:
            raise ZeroDivisionError("division by a zero LogValue")
        if self.is_zero:
            return self
        return LogValue(self.log - other.log)

    def __pow__(self, exponent: float) -> "LogValue":
        if self.is_zero:
            if exponent <= 0:
                raise ZeroDivisionError("nonpositive power of zero")
            return self
        return LogValue(self.log * exponent)

    def __add__(self, other: "LogValue") -> "LogValue":
        return LogValue(float(np.logaddexp(self.log, other.log)))

    def __lt__(self, other: "LogValue") -> bool:
        return self.log < other.log

    def __le__(self, other: "LogValue") -> bool:
        return self.log <= other.log

    def __gt__(self, other: "LogValue") -> bool:
        return self.log > other.log

    def __ge__(self, other: "LogValue") -> bool:
        return self.log >= other.log

    def __repr__(self) -> str:
        if self.is_zero:
            return "LogValue(0)"
        return f"LogValue(exp({self.log:.12g}))"


def log_sum(logs: Iterable[float]) -> float:
    arr = np.fromiter(logs, dtype=float)
    if arr.size == 0:
        return -math.inf
    top = arr.max()
    if top == -math.inf:
        return -math.inf
    return float(top + np.log(np.sum(np.exp(arr - top))))


def _scale(a: float, b: float) -> float:
    return max(1.0, abs(a) if math.isfinite(a) else 0.0, abs(b) if math.isfinite(b) else 0.0)


def log_close(a: float | LogValue, b: float | LogValue, rel: float = EQ_TOL) -> bool:
    """Equality of two log-magnitudes up to ``rel`` relative slack."""
    a = a.log if isinstance(a, LogValue) else a
    b = b.log if isinstance(b, LogValue) else b
    if a == b:
        return True
    if not (math.isfinite(a) and math.isfinite(b)):
        return False
    return abs(a - b) <= rel * _scale(a, b)


def log_leq(a: float | LogValue, b: float | LogValue, rel: float = EQ_TOL) -> bool:
    """``a <= b`` on log-magnitudes, allowing ``rel`` slack on the large side."""
    a = a.log if isinstance(a, LogValue) else a
    b = b.log if isinstance(b, LogValue) else b
    if a == -math.inf or a <= b:
        return True
    if not math.isfinite(b):
        return False
    return a - b <= rel * _scale(a, b)

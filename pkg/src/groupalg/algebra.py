"""Finitely supported elements of the group algebra C[G] and its Hopf structure."""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .groups import Group


class SpecMismatch(ValueError):
    pass


def _clean(coeffs: Mapping) -> dict:
    return {g: complex(c) for g, c in coeffs.items() if c != 0}


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """``sum_g a_g e_g`` with finitely many nonzero complex coefficients."""

    spec: Group
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = _clean(self.coeffs)
        for g in clean:
            self.spec.check(g)
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def basis(cls, spec: Group, g, coeff: complex = 1.0) -> "AlgebraElement":
        return cls(spec, {g: coeff})

    @classmethod
    def unit(cls, spec: Group) -> "AlgebraElement":
        return cls(spec, {spec.identity(): 1.0})

    @property
    def support(self) -> list:
        return sorted(self.coeffs, key=self.spec.sort_key)

    def __getitem__(self, g) -> complex:
        return self.coeffs.get(g, 0j)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs.items())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AlgebraElement)
            and self.spec == other.spec
            and self.coeffs == other.coeffs
        )

    def isclose(self, other: "AlgebraElement", tol: float = 1e-12) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self[g] - other[g]) <= tol * max(1.0, abs(self[g])) for g in keys)

    def _same(self, other: "AlgebraElement") -> None:
        if self.spec != other.spec:
            raise SpecMismatch(f"{self.spec.name} vs {other.spec.name}")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._same(other)
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, 0) + c
        return AlgebraElement(self.spec, out)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.spec, {g: -c for g, c in self.coeffs.items()})

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, lam: complex) -> "AlgebraElement":
        return AlgebraElement(self.spec, {g: lam * c for g, c in self.coeffs.items()})

    def __rmul__(self, lam) -> "AlgebraElement":
        return self.scale(lam)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return convolve(self, other)
        return self.scale(other)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        fmt = self.spec.format
        return " + ".join(f"({self[g]:g})e[{fmt(g)}]" for g in self.support)


def convolve(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """(ab)_h = sum_g a_g b_{g^{-1}h}."""
    a._same(b)
    mul = a.spec._mul
    out: dict = {}
    for g, x in a.coeffs.items():
        for k, y in b.coeffs.items():
            h = mul(g, k)
            out[h] = out.get(h, 0) + x * y
    return AlgebraElement(a.spec, out)


def star(a: AlgebraElement) -> AlgebraElement:
    inv = a.spec._inv
    return AlgebraElement(a.spec, {inv(g): c.conjugate() for g, c in a.coeffs.items()})


def antipode(a: AlgebraElement) -> AlgebraElement:
    inv = a.spec._inv
    return AlgebraElement(a.spec, {inv(g): c for g, c in a.coeffs.items()})


def counit(a: AlgebraElement) -> complex:
    return complex(sum(a.coeffs.values()))


def trace(a: AlgebraElement) -> complex:
    return a[a.spec.identity()]


def dual_pairing(phi: AlgebraElement, a: AlgebraElement) -> complex:
    """<phi, a> = sum_g a_g phi_g."""
    phi._same(a)
    small, big = (a, phi) if len(a) <= len(phi) else (phi, a)
    return complex(sum(c * big[g] for g, c in small.coeffs.items()))


@dataclass(frozen=True, eq=False)
class ProductAlgebraElement:
    """Element of C[G x G], the algebraic tensor square of C[G]."""

    spec: Group
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _clean(self.coeffs))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ProductAlgebraElement)
            and self.spec == other.spec
            and self.coeffs == other.coeffs
        )

    def __getitem__(self, gh) -> complex:
        return self.coeffs.get(gh, 0j)


def tensor(a: AlgebraElement, b: AlgebraElement) -> ProductAlgebraElement:
    a._same(b)
    return ProductAlgebraElement(
        a.spec, {(g, h): x * y for g, x in a.coeffs.items() for h, y in b.coeffs.items()}
    )


def convolve_product(x: ProductAlgebraElement, y: ProductAlgebraElement) -> ProductAlgebraElement:
    mul = x.spec._mul
    out: dict = {}
    for (g1, h1), c1 in x.coeffs.items():
        for (g2, h2), c2 in y.coeffs.items():
            key = (mul(g1, g2), mul(h1, h2))
            out[key] = out.get(key, 0) + c1 * c2
    return ProductAlgebraElement(x.spec, out)


def coproduct(a: AlgebraElement) -> ProductAlgebraElement:
    """Delta(a) = sum_g a_g e_g (x) e_g."""
    return ProductAlgebraElement(a.spec, {(g, g): c for g, c in a.coeffs.items()})


def counit_left(x: ProductAlgebraElement) -> AlgebraElement:
    """(epsilon (x) id) applied to an element of C[G x G]."""
    out: dict = {}
    for (_, h), c in x.coeffs.items():
        out[h] = out.get(h, 0) + c
    return AlgebraElement(x.spec, out)


def counit_right(x: ProductAlgebraElement) -> AlgebraElement:
    out: dict = {}
    for (g, _), c in x.coeffs.items():
        out[g] = out.get(g, 0) + c
    return AlgebraElement(x.spec, out)


def is_grouplike(x: AlgebraElement) -> bool:
    """Delta(x) = x (x) x and epsilon(x) = 1."""
    return coproduct(x) == tensor(x, x) and abs(counit(x) - 1) < 1e-12


# text format: one term per line, "re im normal-form"

def dumps_element(a: AlgebraElement) -> str:
    out = io.StringIO()
    for g in a.support:
        c = a[g]
        out.write(f"{c.real + 0.0!r} {c.imag + 0.0!r} {a.spec.format(g)}\n")
    return out.getvalue()


def loads_element(spec: Group, text: str) -> AlgebraElement:
    coeffs: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 're im normal-form', got {line!r}")
        g = spec.parse(parts[2])
        coeffs[g] = coeffs.get(g, 0) + complex(float(parts[0]), float(parts[1]))
    return AlgebraElement(spec, coeffs)


def random_element(
    rng: np.random.Generator,
    pool: list,
    spec: Group,
    max_terms: int = 5,
    complex_coeffs: bool = True,
) -> AlgebraElement:
    """Sparse element with support drawn from ``pool`` and Gaussian coefficients."""
    n = int(rng.integers(1, max_terms + 1))
    idx = rng.choice(len(pool), size=min(n, len(pool)), replace=False)
    re = rng.normal(size=len(idx))
    im = rng.normal(size=len(idx)) if complex_coeffs else np.zeros(len(idx))
    return AlgebraElement(spec, {pool[i]: complex(x, y) for i, x, y in zip(idx, re, im)})


def from_terms(spec: Group, terms: Iterable[tuple]) -> AlgebraElement:
    """Build from ``(coefficient, element-or-normal-form)`` pairs."""
    out: dict = {}
    for c, g in terms:
        g = spec.parse(g) if isinstance(g, str) else g
        out[g] = out.get(g, 0) + c
    return AlgebraElement(spec, out)

"""Cayley balls: word lengths, surface growth and volume growth."""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .groups import Cyclic, DirectProduct, FreeAbelian, FreeGroup, Group

DEFAULT_CAP = 5_000_000
CACHE_VERSION = 1


class OutOfBall(KeyError):
    """The element lies outside the enumerated ball; enlarge the radius."""

    def __init__(self, element, radius):
        super().__init__(element)
        self.element = element
        self.radius = radius

    def __str__(self):
        return f"element {self.element!r} is outside the ball of radius {self.radius}"


class BallCapExceeded(RuntimeError):
    pass


class CacheCorrupt(ValueError):
    pass


@dataclass(frozen=True)
class GrowthCounts:
    """Surface and volume growth arrays without the elements themselves."""

    spec: Group
    radius: int
    sigma: tuple
    beta: tuple
    method: str = "bfs"


@dataclass(frozen=True, eq=False)
class LengthTable:
    spec: Group
    radius: int
    lengths: dict
    sigma: tuple
    beta: tuple

    def __eq__(self, other):
        return (
            isinstance(other, LengthTable)
            and self.spec == other.spec
            and self.radius == other.radius
            and self.sigma == other.sigma
            and list(self.lengths.items()) == list(other.lengths.items())
        )

    def __contains__(self, g) -> bool:
        return g in self.lengths

    def __len__(self) -> int:
        return len(self.lengths)

    def length(self, g) -> int:
        try:
            return self.lengths[g]
        except KeyError:
            raise OutOfBall(g, self.radius) from None

    @cached_property
    def elements(self) -> list:
        return list(self.lengths)

    @cached_property
    def index(self) -> dict:
        return {g: i for i, g in enumerate(self.lengths)}

    @cached_property
    def length_array(self) -> np.ndarray:
        return np.fromiter(self.lengths.values(), dtype=np.int64, count=len(self.lengths))

    def shell(self, n: int) -> list:
        if not 0 <= n <= self.radius:
            raise OutOfBall(f"shell {n}", self.radius)
        return [g for g, l in self.lengths.items() if l == n]

    @property
    def counts(self) -> GrowthCounts:
        return GrowthCounts(self.spec, self.radius, self.sigma, self.beta, "bfs")


def enumerate_ball(spec: Group, radius: int, cap: int = DEFAULT_CAP) -> LengthTable:
    """Breadth-first search from the identity by right multiplication.

    The returned ``lengths`` mapping is ordered by (length, normal form), so
    the table does not depend on generator order.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    e = spec.identity()
    seen = {e: 0}
    frontier = [e]
    shells = [[e]]
    mul, gens = spec._mul, spec.generators
    for n in range(1, radius + 1):
        nxt = []
        for g in frontier:
            for s in gens:
                h = mul(g, s)
                if h not in seen:
                    seen[h] = n
                    nxt.append(h)
        if len(seen) > cap:
            raise BallCapExceeded(
                f"ball of radius {n} in {spec.name} has more than {cap} elements"
            )
        shells.append(nxt)
        frontier = nxt
    lengths = {}
    for n, shell in enumerate(shells):
        for g in sorted(shell, key=spec.sort_key):
            lengths[g] = n
    sigma = tuple(len(s) for s in shells)
    return LengthTable(spec, radius, lengths, sigma, _cumulative(sigma))


def _cumulative(sigma) -> tuple:
    out, total = [], 0
    for s in sigma:
        total += s
        out.append(total)
    return tuple(out)


def word_length(table: LengthTable, g) -> int:
    return table.length(g)


def word_metric(table: LengthTable, g, h) -> int:
    """d(g, h) = L(g^{-1} h)."""
    spec = table.spec
    return table.length(spec.multiply(spec.inverse(g), h))


def _sphere_counts_exact(spec: Group, radius: int) -> list[int] | None:
    """Exact sphere sizes by counting, for default generating sets only."""
    if not spec.uses_default_generators:
        return None
    if isinstance(spec, FreeGroup):
        # geodesics are the reduced words: count them by their last letter
        k2 = 2 * spec.rank
        counts = [1]
        last = [1] * k2
        if radius >= 1:
            counts.append(k2)
        for _ in range(2, radius + 1):
            total = sum(last)
            # a word may not end in the inverse of its previous letter;
            # letters are paired (i, i^-1) at positions (2j, 2j+1)
            last = [total - last[i ^ 1] for i in range(k2)]
            counts.append(sum(last))
        return counts[: radius + 1]
    if isinstance(spec, Cyclic):
        m = spec.order
        counts = [0] * (radius + 1)
        for r in range(m):
            d = min(r, m - r)
            if d <= radius:
                counts[d] += 1
        return counts
    if isinstance(spec, FreeAbelian):
        z = [1] + [2] * radius
        out = [1] + [0] * radius
        for _ in range(spec.dim):
            out = _convolve_trunc(out, z, radius)
        return out
    if isinstance(spec, DirectProduct):
        out = [1] + [0] * radius
        for f in spec.factors:
            part = _sphere_counts_exact(f, radius)
            if part is None:
                part = list(enumerate_ball(f, radius).sigma)
            out = _convolve_trunc(out, part, radius)
        return out
    return None


def exact_length(spec: Group):
    """Closed-form word length for default generating sets, or None.

    Free groups: length of the reduced word.  Free abelian: l1 norm.
    Cyclic: distance to 0 around the cycle.  Products: sum over factors.
    """
    if not spec.uses_default_generators:
        return None
    if isinstance(spec, FreeGroup):
        return len
    if isinstance(spec, FreeAbelian):
        return lambda g: sum(abs(x) for x in g)
    if isinstance(spec, Cyclic):
        m = spec.order
        return lambda g: min(g, m - g)
    if isinstance(spec, DirectProduct):
        parts = [exact_length(f) for f in spec.factors]
        if any(p is None for p in parts):
            return None
        return lambda g: sum(p(x) for p, x in zip(parts, g))
    return None


def _convolve_trunc(a, b, radius):
    out = [0] * (radius + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(radius + 1 - i):
                out[i + j] += x * b[j]
    return out


def count_spheres(spec: Group, radius: int, cap: int = DEFAULT_CAP) -> GrowthCounts:
    """sigma/beta up to ``radius``.

    Uses exact combinatorial counting where the family and generating set
    allow it (free groups via reduced words, free abelian/cyclic groups and
    products via convolution of factor spheres); otherwise falls back to
    breadth-first enumeration.
    """
    counts = _sphere_counts_exact(spec, radius)
    if counts is None:
        return enumerate_ball(spec, radius, cap).counts
    return GrowthCounts(spec, radius, tuple(counts), _cumulative(counts), "counting")


# serialization

def dump_table(table: LengthTable) -> str:
    out = io.StringIO()
    out.write(f"# groupalg-lengthtable v{CACHE_VERSION}\n")
    out.write(f"# spec {table.spec.spec_hash()}\n")
    out.write(f"# radius {table.radius}\n")
    fmt = table.spec.format
    for g, n in table.lengths.items():
        out.write(f"{fmt(g)},{n}\n")
    return out.getvalue()


def load_table(spec: Group, text: str) -> LengthTable:
    lines = text.splitlines()
    if len(lines) < 3 or not lines[0].startswith("# groupalg-lengthtable v"):
        raise CacheCorrupt("missing length-table header")
    version = int(lines[0].rsplit("v", 1)[1])
    if version != CACHE_VERSION:
        raise CacheCorrupt(f"unsupported cache version {version}")
    spec_hash = lines[1].split()[-1]
    if spec_hash != spec.spec_hash():
        raise CacheCorrupt(f"spec hash mismatch: file {spec_hash}, expected {spec.spec_hash()}")
    radius = int(lines[2].split()[-1])
    lengths = {}
    for line in lines[3:]:
        if not line:
            continue
        nf, n = line.rsplit(",", 1)
        lengths[spec.parse(nf)] = int(n)
    sigma = [0] * (radius + 1)
    for n in lengths.values():
        if n > radius:
            raise CacheCorrupt(f"length {n} exceeds radius {radius}")
        sigma[n] += 1
    return LengthTable(spec, radius, lengths, tuple(sigma), _cumulative(sigma))


def cache_path(cache_dir: str | os.PathLike, spec: Group, radius: int) -> Path:
    return Path(cache_dir) / f"ball-{spec.spec_hash()}-r{radius}.txt"


def cached_ball(spec: Group, radius: int, cache_dir=None, cap: int = DEFAULT_CAP) -> LengthTable:
    """Enumerate a ball, reusing ``cache_dir`` when a matching file exists."""
    if cache_dir is None:
        return enumerate_ball(spec, radius, cap)
    path = cache_path(cache_dir, spec, radius)
    if path.exists():
        return load_table(spec, path.read_text())
    table = enumerate_ball(spec, radius, cap)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(dump_table(table))
    tmp.replace(path)
    return table


def growth_csv(counts) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "sigma", "beta"])
    for n, (s, b) in enumerate(zip(counts.sigma, counts.beta)):
        w.writerow([n, s, b])
    return out.getvalue()

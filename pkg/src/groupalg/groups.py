"""Catalog of finitely generated groups with exact normal forms.

Elements are plain hashable Python values:

* ``FreeGroup(k)``: reduced words as tuples of nonzero ints, ``i+1`` for the
  i-th generator and ``-(i+1)`` for its inverse;
* ``FreeAbelian(d)``: integer tuples of length d;
* ``Cyclic(m)``: residues in ``range(m)``;
* ``Heisenberg``: triples ``(a, b, c)`` with
  ``(a,b,c)(a',b',c') = (a+a', b+b', c+c'+a*b')``;
* ``DirectProduct``: tuples of factor elements.

Every family carries an inverse-closed generating set.  When none is given
the documented default is used (signed standard generators).
"""
from __future__ import annotations

import hashlib
import json
import string
from dataclasses import dataclass, field
from typing import Any, Hashable, Sequence

Element = Hashable


class FamilyMismatch(TypeError):
    """An element does not conform to the group it was used with."""


class Group:
    """Shared behaviour of the catalog families.

    Subclasses implement ``identity``, ``_mul``, ``_inv``, ``conforms``,
    ``default_generators``, ``format``, ``_parse`` and ``params``.
    """

    generators: tuple

    def _init_generators(self, generators) -> None:
        if generators is None:
            gens = self.default_generators()
        else:
            gens = tuple(self._coerce(g) for g in generators)
        seen = []
        for g in gens:
            if not self.conforms(g):
                raise FamilyMismatch(f"generator {g!r} is not an element of {self.name}")
            if g == self.identity():
                raise ValueError("generating set must not contain the identity")
            if g not in seen:
                seen.append(g)
        for g in seen:
            if self._inv(g) not in seen:
                raise ValueError(
                    f"generating set is not inverse-closed: missing inverse of {self.format(g)}"
                )
        object.__setattr__(self, "generators", tuple(seen))

    def _coerce(self, g):
        return self.parse(g) if isinstance(g, str) else g

    # group operations with conformance checks
    def multiply(self, g, h):
        self.check(g)
        self.check(h)
        return self._mul(g, h)

    def inverse(self, g):
        self.check(g)
        return self._inv(g)

    def power(self, g, n: int):
        self.check(g)
        if n < 0:
            g, n = self._inv(g), -n
        result, base = self.identity(), g
        while n:
            if n & 1:
                result = self._mul(result, base)
            base = self._mul(base, base)
            n >>= 1
        return result

    def product(self, elements: Sequence) -> Element:
        result = self.identity()
        for g in elements:
            result = self.multiply(result, g)
        return result

    def check(self, g) -> None:
        if not self.conforms(g):
            raise FamilyMismatch(f"{g!r} is not an element of {self.name}")

    def parse(self, text: str):
        g = self._parse(text.strip())
        self.check(g)
        return g

    def sort_key(self, g):
        return g

    @property
    def uses_default_generators(self) -> bool:
        return self.generators == self.default_generators()

    def describe(self) -> dict:
        """JSON-friendly description; generator list included."""
        d = {"family": self.family, **self.params()}
        d["generators"] = [self.format(g) for g in self.generators]
        return d

    def spec_hash(self) -> str:
        blob = json.dumps(self.describe(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def growth_class(self) -> tuple[str, int]:
        """Growth type of the group: ``("bounded", 0)``, ``("poly", d)`` or ``("exp", 0)``.

        These are standard facts (Bass-Guivarc'h for the nilpotent cases) and
        do not depend on the generating set.
        """
        raise NotImplementedError


def _parse_int_tuple(text: str) -> tuple[int, ...]:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    if not text.strip():
        return ()
    return tuple(int(part) for part in text.split(","))


@dataclass(frozen=True)
class FreeGroup(Group):
    rank: int
    generators: tuple = field(default=None, compare=True)

    family = "free"

    def __post_init__(self):
        if not 1 <= self.rank <= 26:
            raise ValueError("free group rank must be between 1 and 26")
        self._init_generators(self.generators)

    @property
    def name(self) -> str:
        return f"F_{self.rank}"

    def params(self) -> dict:
        return {"rank": self.rank}

    def identity(self):
        return ()

    def conforms(self, g) -> bool:
        if not isinstance(g, tuple):
            return False
        prev = 0
        for x in g:
            if not isinstance(x, int) or x == 0 or abs(x) > self.rank or x == -prev:
                return False
            prev = x
        return True

    def _mul(self, g, h):
        # cancel the longest suffix of g against the prefix of h
        i = 0
        n = min(len(g), len(h))
        while i < n and g[len(g) - 1 - i] == -h[i]:
            i += 1
        return g[: len(g) - i] + h[i:]

    def _inv(self, g):
        return tuple(-x for x in reversed(g))

    def sort_key(self, g):
        return (len(g), tuple((abs(x), x < 0) for x in g))

    def default_generators(self) -> tuple:
        gens = []
        for i in range(1, self.rank + 1):
            gens += [(i,), (-i,)]
        return tuple(gens)

    def word(self, letters: Sequence[int]):
        """Reduce an arbitrary signed-letter word."""
        out: list[int] = []
        for x in letters:
            if x == 0 or abs(x) > self.rank:
                raise FamilyMismatch(f"letter {x} outside rank {self.rank}")
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return tuple(out)

    def format(self, g) -> str:
        if not g:
            return "1"
        return "".join(
            string.ascii_lowercase[x - 1] if x > 0 else string.ascii_uppercase[-x - 1] for x in g
        )

    def _parse(self, text: str):
        if text in ("1", "e", ""):
            if text == "e" and self.rank >= 5:
                raise ValueError("'e' is a generator letter for rank >= 5; write the identity as 1")
            return ()
        letters = []
        for ch in text:
            if ch in string.ascii_lowercase:
                letters.append(string.ascii_lowercase.index(ch) + 1)
            elif ch in string.ascii_uppercase:
                letters.append(-(string.ascii_uppercase.index(ch) + 1))
            else:
                raise ValueError(f"bad free-group letter {ch!r} in {text!r}")
        return self.word(letters)

    def growth_class(self):
        return ("poly", 1) if self.rank == 1 else ("exp", 0)


@dataclass(frozen=True)
class FreeAbelian(Group):
    dim: int
    generators: tuple = field(default=None, compare=True)

    family = "free_abelian"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("free abelian rank must be >= 1")
        self._init_generators(self.generators)

    @property
    def name(self) -> str:
        return "Z" if self.dim == 1 else f"Z^{self.dim}"

    def params(self) -> dict:
        return {"dim": self.dim}

    def identity(self):
        return (0,) * self.dim

    def conforms(self, g) -> bool:
        return (
            isinstance(g, tuple)
            and len(g) == self.dim
            and all(isinstance(x, int) for x in g)
        )

    def _mul(self, g, h):
        return tuple(x + y for x, y in zip(g, h))

    def _inv(self, g):
        return tuple(-x for x in g)

    def default_generators(self) -> tuple:
        gens = []
        for i in range(self.dim):
            for s in (1, -1):
                v = [0] * self.dim
                v[i] = s
                gens.append(tuple(v))
        return tuple(gens)

    def format(self, g) -> str:
        return "(" + ",".join(str(x) for x in g) + ")"

    def _parse(self, text: str):
        if self.dim == 1 and not text.startswith("("):
            return (int(text),)
        return _parse_int_tuple(text)

    def growth_class(self):
        return ("poly", self.dim)


@dataclass(frozen=True)
class Cyclic(Group):
    order: int
    generators: tuple = field(default=None, compare=True)

    family = "cyclic"

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("cyclic order must be >= 2")
        self._init_generators(self.generators)

    @property
    def name(self) -> str:
        return f"C_{self.order}"

    def params(self) -> dict:
        return {"order": self.order}

    def identity(self):
        return 0

    def conforms(self, g) -> bool:
        return isinstance(g, int) and not isinstance(g, bool) and 0 <= g < self.order

    def _mul(self, g, h):
        return (g + h) % self.order

    def _inv(self, g):
        return (-g) % self.order

    def default_generators(self) -> tuple:
        return (1, self.order - 1) if self.order > 2 else (1,)

    def format(self, g) -> str:
        return str(g)

    def _parse(self, text: str):
        return int(text) % self.order

    def growth_class(self):
        return ("bounded", 0)


@dataclass(frozen=True)
class Heisenberg(Group):
    generators: tuple = field(default=None, compare=True)

    family = "heisenberg"

    def __post_init__(self):
        self._init_generators(self.generators)

    name = "H_3(Z)"

    def params(self) -> dict:
        return {}

    def identity(self):
        return (0, 0, 0)

    def conforms(self, g) -> bool:
        return isinstance(g, tuple) and len(g) == 3 and all(isinstance(x, int) for x in g)

    def _mul(self, g, h):
        return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])

    def _inv(self, g):
        a, b, c = g
        return (-a, -b, -c + a * b)

    def default_generators(self) -> tuple:
        return ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0))

    def format(self, g) -> str:
        return "(" + ",".join(str(x) for x in g) + ")"

    def _parse(self, text: str):
        return _parse_int_tuple(text)

    def growth_class(self):
        return ("poly", 4)


def _split_top(text: str) -> list[str]:
    depth, start, parts = 0, 0, []
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == ";" and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return parts


@dataclass(frozen=True)
class DirectProduct(Group):
    factors: tuple
    generators: tuple = field(default=None, compare=True)

    family = "product"

    def __post_init__(self):
        if len(self.factors) < 2:
            raise ValueError("a direct product needs at least two factors")
        object.__setattr__(self, "factors", tuple(self.factors))
        self._init_generators(self.generators)

    @property
    def name(self) -> str:
        return " x ".join(f.name for f in self.factors)

    def params(self) -> dict:
        return {"factors": [f.describe() for f in self.factors]}

    def identity(self):
        return tuple(f.identity() for f in self.factors)

    def conforms(self, g) -> bool:
        return (
            isinstance(g, tuple)
            and len(g) == len(self.factors)
            and all(f.conforms(x) for f, x in zip(self.factors, g))
        )

    def _mul(self, g, h):
        return tuple(f._mul(x, y) for f, x, y in zip(self.factors, g, h))

    def _inv(self, g):
        return tuple(f._inv(x) for f, x in zip(self.factors, g))

    def sort_key(self, g):
        return tuple(f.sort_key(x) for f, x in zip(self.factors, g))

    def embed(self, i: int, x):
        g = list(self.identity())
        g[i] = x
        return tuple(g)

    def default_generators(self) -> tuple:
        gens = []
        for i, f in enumerate(self.factors):
            gens += [self.embed(i, s) for s in f.generators]
        return tuple(gens)

    def format(self, g) -> str:
        return "[" + ";".join(f.format(x) for f, x in zip(self.factors, g)) + "]"

    def _parse(self, text: str):
        if not (text.startswith("[") and text.endswith("]")):
            raise ValueError(f"product element must look like [g1;g2;...], got {text!r}")
        parts = _split_top(text[1:-1])
        if len(parts) != len(self.factors):
            raise FamilyMismatch(f"{text!r} has {len(parts)} components, expected {len(self.factors)}")
        return tuple(f.parse(p) for f, p in zip(self.factors, parts))

    def growth_class(self):
        kinds = [f.growth_class() for f in self.factors]
        if any(k == "exp" for k, _ in kinds):
            return ("exp", 0)
        degree = sum(d for k, d in kinds if k == "poly")
        return ("poly", degree) if degree else ("bounded", 0)


# module-level spellings of the group operations
def multiply(spec: Group, g, h):
    return spec.multiply(g, h)


def inverse(spec: Group, g):
    return spec.inverse(g)


_SHORTHAND = {
    "z": lambda: FreeAbelian(1),
    "heis": Heisenberg,
    "heisenberg": Heisenberg,
}


def parse_group(text: str) -> Group:
    """Parse a compact group name.

    ``z``, ``z2``/``z^3`` (free abelian), ``f2`` (free), ``c5`` (cyclic),
    ``heis`` and products joined by ``x`` such as ``z2xf2``.
    """
    text = text.strip().lower().replace(" ", "")
    if "x" in text:
        return DirectProduct(tuple(parse_group(part) for part in text.split("x")))
    if text in _SHORTHAND:
        return _SHORTHAND[text]()
    head, num = text[0], text[1:].lstrip("^_")
    try:
        n = int(num)
    except ValueError:
        raise ValueError(f"unknown group {text!r}") from None
    if head == "z":
        return FreeAbelian(n)
    if head == "f":
        return FreeGroup(n)
    if head == "c":
        return Cyclic(n)
    raise ValueError(f"unknown group {text!r}")


def group_from_config(cfg: dict[str, Any] | str) -> Group:
    """Build a group from a config mapping (or a shorthand string).

    Keys: ``family`` plus ``rank``/``dim``/``order``/``factors`` and an
    optional ``generators`` list of normal-form strings.
    """
    if isinstance(cfg, str):
        return parse_group(cfg)
    cfg = dict(cfg)
    family = cfg.pop("family", None)
    gens = cfg.pop("generators", None)
    allowed = {
        "free": {"rank"},
        "free_abelian": {"dim"},
        "cyclic": {"order"},
        "heisenberg": set(),
        "product": {"factors"},
    }
    if family not in allowed:
        raise ValueError(f"unknown group family {family!r}")
    unknown = set(cfg) - allowed[family]
    if unknown:
        raise ValueError(f"unknown keys for {family}: {sorted(unknown)}")
    if family == "product":
        factors = tuple(group_from_config(f) for f in cfg["factors"])
        base = DirectProduct(factors)
    else:
        base = {
            "free": lambda: FreeGroup(int(cfg["rank"])),
            "free_abelian": lambda: FreeAbelian(int(cfg["dim"])),
            "cyclic": lambda: Cyclic(int(cfg["order"])),
            "heisenberg": Heisenberg,
        }[family]()
    if gens is None:
        return base
    parsed = tuple(base.parse(s) for s in gens)
    return type(base)(**{**_ctor_args(base), "generators": parsed})


def _ctor_args(g: Group) -> dict:
    if isinstance(g, FreeGroup):
        return {"rank": g.rank}
    if isinstance(g, FreeAbelian):
        return {"dim": g.dim}
    if isinstance(g, Cyclic):
        return {"order": g.order}
    if isinstance(g, DirectProduct):
        return {"factors": g.factors}
    return {}


def with_generators(g: Group, generators) -> Group:
    """Same group, different generating set."""
    return type(g)(**{**_ctor_args(g), "generators": tuple(g._coerce(s) for s in generators)})

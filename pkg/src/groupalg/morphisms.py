"""Group morphisms given by generator images, and their linear extension to C[G]."""
from __future__ import annotations

from dataclasses import dataclass

from .algebra import AlgebraElement
from .groups import Cyclic, DirectProduct, FreeAbelian, FreeGroup, Group, Heisenberg


class RelationViolation(ValueError):
    def __init__(self, relation: str):
        super().__init__(f"generator images violate the relation {relation}")
        self.relation = relation


def standard_generators(spec: Group) -> tuple:
    """Generators whose images define a morphism out of ``spec``.

    Free group: x_1..x_k.  Free abelian: unit vectors.  Cyclic: 1.
    Heisenberg: x = (1,0,0), y = (0,1,0).  Products: the factors' standard
    generators, embedded.
    """
    if isinstance(spec, FreeGroup):
        return tuple((i,) for i in range(1, spec.rank + 1))
    if isinstance(spec, FreeAbelian):
        return tuple(
            tuple(1 if j == i else 0 for j in range(spec.dim)) for i in range(spec.dim)
        )
    if isinstance(spec, Cyclic):
        return (1,)
    if isinstance(spec, Heisenberg):
        return ((1, 0, 0), (0, 1, 0))
    if isinstance(spec, DirectProduct):
        out = []
        for i, f in enumerate(spec.factors):
            out += [spec.embed(i, s) for s in standard_generators(f)]
        return tuple(out)
    raise TypeError(f"no standard generators for {spec!r}")


@dataclass(frozen=True)
class Morphism:
    source: Group
    target: Group
    images: tuple

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.target._coerce(x) for x in self.images))
        n = len(standard_generators(self.source))
        if len(self.images) != n:
            raise ValueError(f"{self.source.name} needs {n} generator images, got {len(self.images)}")
        for x in self.images:
            self.target.check(x)
        self.validate()

    def validate(self) -> None:
        _validate(self.source, self.target, list(self.images), "")

    def __call__(self, g):
        self.source.check(g)
        return _apply(self.source, self.target, list(self.images), g)


def _commute(T: Group, x, y) -> bool:
    return T._mul(x, y) == T._mul(y, x)


def _validate(S: Group, T: Group, imgs: list, where: str) -> None:
    fmt = T.format
    if isinstance(S, FreeGroup):
        return
    if isinstance(S, FreeAbelian):
        for i in range(len(imgs)):
            for j in range(i + 1, len(imgs)):
                if not _commute(T, imgs[i], imgs[j]):
                    raise RelationViolation(
                        f"{where}[e{i+1}, e{j+1}] = 1 (images {fmt(imgs[i])}, {fmt(imgs[j])})"
                    )
        return
    if isinstance(S, Cyclic):
        if T.power(imgs[0], S.order) != T.identity():
            raise RelationViolation(f"{where}x^{S.order} = 1 (image {fmt(imgs[0])})")
        return
    if isinstance(S, Heisenberg):
        X, Y = imgs
        Z = T.product([X, Y, T._inv(X), T._inv(Y)])
        if not _commute(T, Z, X):
            raise RelationViolation(f"{where}[[x,y], x] = 1")
        if not _commute(T, Z, Y):
            raise RelationViolation(f"{where}[[x,y], y] = 1")
        return
    if isinstance(S, DirectProduct):
        pos = 0
        blocks = []
        for i, f in enumerate(S.factors):
            n = len(standard_generators(f))
            block = imgs[pos : pos + n]
            _validate(f, T, block, f"{where}factor {i}: ")
            blocks.append(block)
            pos += n
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                for x in blocks[i]:
                    for y in blocks[j]:
                        if not _commute(T, x, y):
                            raise RelationViolation(
                                f"{where}factors {i} and {j} commute ({fmt(x)}, {fmt(y)})"
                            )
        return
    raise TypeError(f"unsupported source {S!r}")


def _apply(S: Group, T: Group, imgs: list, g):
    if isinstance(S, FreeGroup):
        out = T.identity()
        for x in g:
            img = imgs[abs(x) - 1]
            out = T._mul(out, img if x > 0 else T._inv(img))
        return out
    if isinstance(S, FreeAbelian):
        out = T.identity()
        for img, n in zip(imgs, g):
            out = T._mul(out, T.power(img, n))
        return out
    if isinstance(S, Cyclic):
        return T.power(imgs[0], g)
    if isinstance(S, Heisenberg):
        # (a, b, c) = x^a y^b z^(c - ab) with z = [x, y]
        a, b, c = g
        X, Y = imgs
        Z = T.product([X, Y, T._inv(X), T._inv(Y)])
        return T.product([T.power(X, a), T.power(Y, b), T.power(Z, c - a * b)])
    if isinstance(S, DirectProduct):
        out = T.identity()
        pos = 0
        for f, x in zip(S.factors, g):
            n = len(standard_generators(f))
            out = T._mul(out, _apply(f, T, imgs[pos : pos + n], x))
            pos += n
        return out
    raise TypeError(f"unsupported source {S!r}")


def push_forward(phi: Morphism, a: AlgebraElement) -> AlgebraElement:
    """phi(sum a_g e_g) = sum a_g e_{phi(g)}; coefficients at a common image add up."""
    if a.spec != phi.source:
        raise ValueError(f"element lives in {a.spec.name}, morphism starts at {phi.source.name}")
    out: dict = {}
    for g, c in a.coeffs.items():
        h = phi(g)
        out[h] = out.get(h, 0) + c
    return AlgebraElement(phi.target, out)


def identity_morphism(spec: Group) -> Morphism:
    return Morphism(spec, spec, standard_generators(spec))


def abelianization(spec: FreeGroup) -> Morphism:
    target = FreeAbelian(spec.rank)
    return Morphism(spec, target, standard_generators(target))

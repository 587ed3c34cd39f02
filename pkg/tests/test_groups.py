import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupalg.groups import (
    Cyclic,
    DirectProduct,
    FamilyMismatch,
    FreeAbelian,
    FreeGroup,
    Heisenberg,
    group_from_config,
    inverse,
    multiply,
    parse_group,
    with_generators,
)

from conftest import GROUP_STRATEGIES, free_words, heis


def _triples():
    return st.sampled_from(GROUP_STRATEGIES).flatmap(
        lambda gs: st.tuples(st.just(gs[0]), gs[1], gs[1], gs[1])
    )


@settings(max_examples=300, deadline=None)
@given(_triples())
def test_group_axioms(case):
    G, g, h, k = case
    e = G.identity()
    assert G.multiply(G.multiply(g, h), k) == G.multiply(g, G.multiply(h, k))
    assert G.multiply(g, e) == g == G.multiply(e, g)
    assert G.multiply(g, G.inverse(g)) == e
    assert G.inverse(G.inverse(g)) == g


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(GROUP_STRATEGIES).flatmap(lambda gs: st.tuples(st.just(gs[0]), gs[1])))
def test_format_parse_roundtrip(case):
    G, g = case
    assert G.parse(G.format(g)) == g


def test_free_group_reduction():
    F = FreeGroup(2)
    assert F.word([1, 2, -2, -1]) == ()
    assert F.parse("abBA") == ()
    assert F.format(F.multiply(F.parse("ab"), F.parse("Ba"))) == "aa"
    assert F.parse("e") == F.identity()
    with pytest.raises(ValueError):
        FreeGroup(5).parse("e")


def test_heisenberg_product_rule():
    H = Heisenberg()
    assert H.multiply((1, 0, 0), (0, 1, 0)) == (1, 1, 1)
    assert H.multiply((0, 1, 0), (1, 0, 0)) == (1, 1, 0)
    # commutator of the generators is central
    x, y = (1, 0, 0), (0, 1, 0)
    z = H.product([x, y, H.inverse(x), H.inverse(y)])
    assert z == (0, 0, 1)
    assert H.multiply(z, x) == H.multiply(x, z)


@given(heis(), heis())
def test_heisenberg_matches_matrices(g, h):
    import numpy as np

    def mat(t):
        a, b, c = t
        return np.array([[1, a, c], [0, 1, b], [0, 0, 1]])

    gh = Heisenberg().multiply(g, h)
    assert (mat(g) @ mat(h) == mat(gh)).all()


def test_cyclic_defaults():
    assert Cyclic(2).generators == (1,)
    assert set(Cyclic(5).generators) == {1, 4}


def test_family_mismatch():
    with pytest.raises(FamilyMismatch):
        multiply(FreeAbelian(2), (1, 2), (1, 2, 3))
    with pytest.raises(FamilyMismatch):
        inverse(FreeGroup(2), (1, -1))
    with pytest.raises(FamilyMismatch):
        Cyclic(5).check(5)


def test_generator_validation():
    with pytest.raises(ValueError, match="inverse-closed"):
        FreeAbelian(1, generators=((1,),))
    with pytest.raises(ValueError, match="identity"):
        FreeAbelian(1, generators=((0,), (1,), (-1,)))
    G = with_generators(FreeAbelian(1), ["1", "-1", "2", "-2"])
    assert not G.uses_default_generators
    assert G.spec_hash() != FreeAbelian(1).spec_hash()


def test_parse_group_shorthand():
    assert parse_group("z") == FreeAbelian(1)
    assert parse_group("Z^3") == FreeAbelian(3)
    assert parse_group("f2") == FreeGroup(2)
    assert parse_group("c5") == Cyclic(5)
    assert parse_group("heis") == Heisenberg()
    P = parse_group("z2xf2")
    assert isinstance(P, DirectProduct) and P.factors == (FreeAbelian(2), FreeGroup(2))
    assert P.format(P.parse("[(1,-2);aB]")) == "[(1,-2);aB]"
    with pytest.raises(ValueError):
        parse_group("q7")


def test_group_from_config():
    G = group_from_config({"family": "free", "rank": 2, "generators": ["a", "A", "b", "B", "ab", "BA"]})
    assert len(G.generators) == 6
    P = group_from_config({"family": "product", "factors": ["z", {"family": "cyclic", "order": 3}]})
    assert P == DirectProduct((FreeAbelian(1), Cyclic(3)))
    with pytest.raises(ValueError, match="unknown keys"):
        group_from_config({"family": "free", "rank": 2, "colour": "red"})
    with pytest.raises(ValueError):
        group_from_config({"family": "monster"})


def test_growth_classes():
    assert FreeAbelian(3).growth_class() == ("poly", 3)
    assert Heisenberg().growth_class() == ("poly", 4)
    assert FreeGroup(2).growth_class() == ("exp", 0)
    assert FreeGroup(1).growth_class() == ("poly", 1)
    assert Cyclic(4).growth_class() == ("bounded", 0)
    assert parse_group("z2xheis").growth_class() == ("poly", 6)
    assert parse_group("c3xf2").growth_class() == ("exp", 0)

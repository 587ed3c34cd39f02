import itertools

import numpy as np
import pytest

from groupalg.ball import (
    BallCapExceeded,
    CacheCorrupt,
    OutOfBall,
    cache_path,
    cached_ball,
    count_spheres,
    dump_table,
    enumerate_ball,
    exact_length,
    growth_csv,
    load_table,
    word_metric,
)
from groupalg.groups import Cyclic, FreeAbelian, FreeGroup, Heisenberg, parse_group, with_generators


def reduced_words(rank, n):
    """Brute force: every word of length n over the 2k letters, kept if reduced."""
    letters = [i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)]
    return [w for w in itertools.product(letters, repeat=n) if all(w[i] != -w[i + 1] for i in range(n - 1))]


def test_free_group_vs_reduced_words():
    table = enumerate_ball(FreeGroup(2), 6)
    for n in range(7):
        words = reduced_words(2, n)
        assert table.sigma[n] == len(words)
        assert all(table.length(w) == n for w in words)


def test_lattice_oracle():
    table = enumerate_ball(FreeAbelian(2), 12)
    for (x, y), n in table.lengths.items():
        assert n == abs(x) + abs(y)
    assert table.beta[12] == 2 * 144 + 24 + 1


def test_z_surface_constant():
    assert enumerate_ball(FreeAbelian(1), 20).sigma[1:] == (2,) * 20


def test_cyclic_ball_saturates():
    t = enumerate_ball(Cyclic(7), 5)
    assert t.sigma == (1, 2, 2, 2, 0, 0)
    assert t.beta[-1] == 7


def test_heisenberg_known_counts():
    # published sphere sizes for the standard generators
    t = enumerate_ball(Heisenberg(), 6)
    assert t.sigma == (1, 4, 12, 36, 82, 164, 294)


def test_heisenberg_degree_four():
    c = count_spheres(Heisenberg(), 20)
    b = np.array(c.beta, dtype=float)
    slope = np.polyfit(np.log(np.arange(14, 21)), np.log(b[14:21]), 1)[0]
    assert 3.6 < slope < 4.2


@pytest.mark.parametrize("name", ["z", "z3", "f2", "f3", "c6", "c2", "z2xf2", "c3xz"])
def test_counting_matches_bfs(name):
    G = parse_group(name)
    N = 5
    assert count_spheres(G, N).sigma == enumerate_ball(G, N).sigma
    assert count_spheres(G, N).method == "counting"


def test_counting_falls_back_for_custom_generators():
    G = with_generators(FreeAbelian(1), ["1", "-1", "2", "-2"])
    c = count_spheres(G, 4)
    assert c.method == "bfs"
    assert c.sigma == (1, 4, 4, 4, 4)
    assert exact_length(G) is None


@pytest.mark.parametrize("name", ["z2", "f2", "c5", "z2xf2"])
def test_exact_length_matches_table(name):
    G = parse_group(name)
    t = enumerate_ball(G, 4)
    L = exact_length(G)
    assert all(L(g) == n for g, n in t.lengths.items())


def test_out_of_ball_and_cap():
    t = enumerate_ball(FreeGroup(2), 3)
    with pytest.raises(OutOfBall):
        t.length((1, 1, 1, 1))
    with pytest.raises(BallCapExceeded):
        enumerate_ball(FreeGroup(2), 10, cap=1000)


def test_word_metric_left_invariant():
    G = FreeGroup(2)
    t = enumerate_ball(G, 6)
    g, h, k = G.parse("ab"), G.parse("Ba"), G.parse("b")
    assert word_metric(t, g, h) == word_metric(t, G.multiply(k, g), G.multiply(k, h))
    assert word_metric(t, g, g) == 0


def test_table_order_is_canonical():
    G = FreeAbelian(1)
    t1 = enumerate_ball(G, 4)
    t2 = enumerate_ball(with_generators(G, ["-1", "1"]), 4)
    assert list(t1.lengths.items()) == list(t2.lengths.items())


def test_cache_roundtrip(tmp_path):
    G = Heisenberg()
    fresh = enumerate_ball(G, 4)
    first = cached_ball(G, 4, tmp_path)
    path = cache_path(tmp_path, G, 4)
    assert path.exists()
    again = cached_ball(G, 4, tmp_path)
    assert fresh == first == again
    assert dump_table(again) == dump_table(fresh) == path.read_text()


def test_cache_rejects_other_spec():
    text = dump_table(enumerate_ball(FreeAbelian(2), 2))
    with pytest.raises(CacheCorrupt, match="hash"):
        load_table(FreeGroup(2), text)
    with pytest.raises(CacheCorrupt):
        load_table(FreeAbelian(2), "garbage\n")


def test_growth_csv():
    text = growth_csv(count_spheres(FreeGroup(2), 6))
    assert text.splitlines()[0] == "n,sigma,beta"
    assert text.splitlines()[-1] == "6,972,1457"

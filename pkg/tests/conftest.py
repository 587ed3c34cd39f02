import numpy as np
import pytest
from hypothesis import strategies as st

from groupalg.groups import Cyclic, DirectProduct, FreeAbelian, FreeGroup, Heisenberg


def free_words(rank=2, max_len=8):
    letters = st.sampled_from([i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)])
    return st.lists(letters, max_size=max_len).map(lambda w: FreeGroup(rank).word(w))


def lattice(dim=2, bound=6):
    return st.tuples(*[st.integers(-bound, bound)] * dim)


def heis(bound=5):
    return st.tuples(st.integers(-bound, bound), st.integers(-bound, bound), st.integers(-3 * bound, 3 * bound))


GROUP_STRATEGIES = [
    (FreeGroup(2), free_words()),
    (FreeGroup(3), free_words(3)),
    (FreeAbelian(2), lattice()),
    (FreeAbelian(3), lattice(3)),
    (Cyclic(7), st.integers(0, 6)),
    (Heisenberg(), heis()),
    (DirectProduct((FreeAbelian(1), FreeGroup(2))), st.tuples(lattice(1), free_words())),
]


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])

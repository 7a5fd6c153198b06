import random

import pytest
from hypothesis import given, settings, strategies as st

from exceptions import PreconditionError
from game_model import derive_rsg, is_nash_by_characterization
from generators import (
    random_nash_allocation,
    random_rsg,
    random_table,
    random_two_resource_rsg,
)

seeds = st.integers(0, 2**32 - 1)


@given(seeds, st.integers(1, 20))
def test_random_table_is_strictly_increasing(seed, n):
    table = random_table(random.Random(seed), n)
    assert len(table) == n
    assert table[0] > 0
    assert all(x < y for x, y in zip(table, table[1:]))


def test_same_seed_same_instance():
    assert random_rsg(random.Random(5), 6, 3) == random_rsg(random.Random(5), 6, 3)
    g = random_two_resource_rsg(random.Random(1), 4, identical=True)
    assert g.n_resources == 2 and g.is_identical()


@given(seeds, st.integers(1, 15), st.integers(1, 6))
@settings(max_examples=60, deadline=None)
def test_random_nash_allocation_is_nash(seed, n, m):
    rng = random.Random(seed)
    g = random_rsg(rng, n, m)
    d = derive_rsg(g)
    a = random_nash_allocation(g, d, rng)
    assert is_nash_by_characterization(g, d, a)


def test_random_nash_allocation_rejects_bad_low_set():
    g = random_rsg(random.Random(0), 3, 2, identical=True)
    d = derive_rsg(g)
    with pytest.raises(PreconditionError):
        random_nash_allocation(g, d, random.Random(0), frozenset())

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from exceptions import BudgetExceededError, PreconditionError
from game_model import Rsg, classify_low_high, derive_rsg, is_nash_by_characterization, is_nash_by_deviation
from coalition_structures import (
    CoalitionStructure,
    PathWitness,
    all_coalitions,
    laminar_to_path,
    singleton_structure,
)
from stability import gb_dominates, is_C_stable
from construction import (
    algorithm1_round_robin,
    build_laminar_forest,
    construct_nash,
    construct_two_resource_laminar_eq,
    find_equilibrium_by_search,
    is_round_robin_balanced,
    iter_symmetric_allocations,
    membership_classes,
    search_space_size,
    trace_two_resource_laminar_eq,
    two_color,
)
from counterexamples import get_fixture
from generators import (
    random_contiguous_structure,
    random_laminar_structure,
    random_partition_structure,
    random_rsg,
    random_subset,
    random_two_resource_rsg,
)

seeds = st.integers(0, 2**32 - 1)


# === NASH ===

@given(seeds, st.integers(1, 12), st.integers(1, 5))
@settings(max_examples=80, deadline=None)
def test_construct_nash_is_nash(seed, n, m):
    g = random_rsg(random.Random(seed), n, m)
    a = construct_nash(g)
    assert is_nash_by_deviation(g, a)
    assert is_nash_by_characterization(g, derive_rsg(g), a)


def test_construct_nash_example1():
    table = (1, 2, 3)
    a = construct_nash(Rsg(3, (table, table)))
    assert a.loads == (2, 1)
    assert str(a) == "({1,2},{3})"


# === ROUND ROBIN ===

def test_round_robin_follows_path():
    table = (1, 2, 3, 4, 5)
    g = Rsg(5, (table, table))
    a = algorithm1_round_robin(g, PathWitness((3, 1, 5, 2, 4)))
    assert a.groups == (frozenset([3, 5, 4]), frozenset([1, 2]))


def test_round_robin_needs_identical_resources():
    g = Rsg(2, ((1, 2), (2, 3)))
    with pytest.raises(PreconditionError):
        algorithm1_round_robin(g, PathWitness((1, 2)))
    table = (1, 2)
    with pytest.raises(PreconditionError):
        algorithm1_round_robin(Rsg(2, (table, table)), PathWitness((1, 2, 3)))


@given(seeds, st.integers(1, 9), st.integers(1, 4))
@settings(max_examples=60, deadline=None)
def test_round_robin_is_stable_on_contiguous_structures(seed, n, m):
    rng = random.Random(seed)
    g = random_rsg(rng, n, m, identical=True)
    C, path = random_contiguous_structure(rng, n)
    a = algorithm1_round_robin(g, path)
    d = derive_rsg(g)
    assert is_nash_by_characterization(g, d, a)
    low, high = classify_low_high(g, d, a)
    assert is_round_robin_balanced(a, low, high, C)
    assert is_C_stable(g, a, C).stable


# === ZWEIFAERBUNG ===

def test_laminar_forest_levels():
    C = CoalitionStructure.of(4, [[1, 2], [1, 2, 3]])
    forest = build_laminar_forest(C)
    assert forest.root == frozenset([1, 2, 3, 4])
    assert forest.mother(frozenset([1, 2])) == frozenset([1, 2, 3])
    assert forest.children(forest.root) == [frozenset([1, 2, 3]), frozenset([4])]
    assert forest.levels[0] == (forest.root,)


@given(seeds, st.integers(1, 12))
@settings(max_examples=100, deadline=None)
def test_two_color_is_balanced(seed, n):
    rng = random.Random(seed)
    C = random_laminar_structure(rng, n)
    subset = random_subset(rng, range(1, n + 1))
    coloring = two_color(subset, C)
    assert coloring.black | coloring.white == subset
    assert not coloring.black & coloring.white
    assert coloring.k == (len(subset) + 1) // 2
    assert coloring.is_balanced_for(C)
    assert abs(coloring.imbalance(C.agents)) <= 1


@st.composite
def laminar_structures(draw, max_agents=7):
    n = draw(st.integers(1, max_agents))
    return random_laminar_structure(random.Random(draw(seeds)), n)


def _balanced_black_sets(subset, C):
    """Alle schwarzen Mengen der Groesse k mit Differenz <= 1 in jeder Koalition"""
    k = (len(subset) + 1) // 2
    found = set()
    for black in itertools.combinations(subset, k):
        black = frozenset(black)
        white = frozenset(subset) - black
        if all(abs(len(black & c) - len(white & c)) <= 1 for c in C):
            found.add(black)
    return found


@given(laminar_structures())
@settings(max_examples=40, deadline=None)
def test_two_color_agrees_with_exhaustive_enumeration(C):
    agents = sorted(C.agents)
    for size in range(1, len(agents) + 1):
        for subset in itertools.combinations(agents, size):
            coloring = two_color(subset, C)
            assert coloring.black | coloring.white == frozenset(subset)
            assert not coloring.black & coloring.white
            assert coloring.black in _balanced_black_sets(subset, C)


def test_two_color_rejects_overlaps():
    with pytest.raises(PreconditionError):
        two_color([1, 2, 3], CoalitionStructure.of(3, [[1, 2], [2, 3]]))
    with pytest.raises(PreconditionError):
        two_color([], CoalitionStructure.of(3, []))


# === ZWEI RESSOURCEN, LAMINAR ===

@given(seeds, st.integers(1, 7), st.booleans())
@settings(max_examples=80, deadline=None)
def test_two_resource_laminar_equilibrium(seed, n, identical):
    rng = random.Random(seed)
    g = random_two_resource_rsg(rng, n, identical=identical)
    C = random_laminar_structure(rng, n)
    result = trace_two_resource_laminar_eq(g, C)
    assert is_C_stable(g, result.allocation, C).stable
    assert result.case in (1, 2, 3)
    previous = None
    for step in result.steps:
        assert step.rule in ("C1", "C3")
        if previous is not None:
            assert gb_dominates(step.allocation, previous, g, C)
        previous = step.allocation


@given(seeds, st.integers(2, 8))
@settings(max_examples=40, deadline=None)
def test_two_resource_partition_equilibrium(seed, n):
    rng = random.Random(seed)
    g = random_two_resource_rsg(rng, n)
    C = random_partition_structure(rng, n)
    a = construct_two_resource_laminar_eq(g, C)
    assert is_C_stable(g, a, C).stable


def test_two_resource_fixture_instance():
    g = Rsg(9, (tuple(range(1, 10)), tuple(range(2, 20, 2))))
    C = CoalitionStructure.of(9, [[1, 2], [3, 4], [7, 8, 9], [1, 2, 3, 4], [5, 6, 7, 8, 9]])
    result = trace_two_resource_laminar_eq(g, C)
    assert is_C_stable(g, result.allocation, C).stable


def test_two_resource_preconditions():
    table = (1, 2, 3)
    with pytest.raises(PreconditionError):
        trace_two_resource_laminar_eq(Rsg(3, (table,) * 3), singleton_structure(3))
    with pytest.raises(PreconditionError):
        trace_two_resource_laminar_eq(Rsg(3, (table, table)), CoalitionStructure.of(3, [[1, 2], [2, 3]]))


# === SUCHE ===

def test_membership_classes():
    C = CoalitionStructure.of(5, [[1, 2], [1, 2, 3]])
    assert membership_classes(C) == [(1, 2), (3,), (4, 5)]
    table = (1, 2, 3, 4, 5)
    g = Rsg(5, (table, table))
    assert search_space_size(g, C) == 3 * 2 * 3
    assert len(list(iter_symmetric_allocations(g, C))) == 18


def test_search_finds_and_misses():
    table = (1, 2, 3)
    g = Rsg(3, (table, table))
    a = find_equilibrium_by_search(g, singleton_structure(3))
    assert a is not None and is_C_stable(g, a, singleton_structure(3)).stable
    assert find_equilibrium_by_search(g, all_coalitions(3)) is None
    fixture = get_fixture("contiguous")
    assert find_equilibrium_by_search(fixture.game, fixture.structure) is None
    with pytest.raises(BudgetExceededError):
        find_equilibrium_by_search(g, all_coalitions(3), budget=4)


@given(seeds, st.integers(1, 5), st.integers(1, 3))
@settings(max_examples=30, deadline=None)
def test_partition_structures_always_have_equilibria(seed, n, m):
    rng = random.Random(seed)
    g = random_rsg(rng, n, m)
    C = random_partition_structure(rng, n)
    assert find_equilibrium_by_search(g, C) is not None


@given(seeds, st.integers(1, 8), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_round_robin_on_laminar_paths(seed, n, m):
    rng = random.Random(seed)
    g = random_rsg(rng, n, m, identical=True)
    C = random_laminar_structure(rng, n)
    a = algorithm1_round_robin(g, laminar_to_path(C))
    assert is_C_stable(g, a, C).stable

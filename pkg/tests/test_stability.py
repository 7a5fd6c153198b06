import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from exceptions import BudgetExceededError, InconsistentWitnessError, PreconditionError
from game_model import Allocation, Rsg, all_allocations, derive_rsg, is_nash_by_characterization, rsg_to_strategic_game
from coalition_structures import CoalitionStructure, all_coalitions, singleton_structure
from stability import (
    STABLE,
    Deviation,
    beta_value,
    deviation_space_size,
    gamma_value,
    gb_dominates,
    is_C_stable,
    is_c_stable_generic,
    is_c_stable_rsg,
    is_profitable,
    lemma_c123_check,
    replay_deviation,
    validated_report,
)
from generators import random_laminar_structure, random_rsg


def example1():
    table = (1, 2, 3)
    return Rsg(3, (table, table))


def test_is_profitable():
    assert is_profitable((2, 2), (2, 1))
    assert not is_profitable((2, 2), (2, 2))
    assert not is_profitable((2, 2), (1, 3))


def test_example1_verdicts():
    g = example1()
    a = Allocation.from_groups([[1, 2], [3]])
    report = is_C_stable(g, a, all_coalitions(3))
    assert not report.stable
    assert report.coalition == frozenset([1, 2])
    assert is_profitable(report.before, report.after)
    assert str(report).startswith("unstable: coalition {1,2} deviation ")
    assert is_C_stable(g, a, singleton_structure(3)) is STABLE
    assert str(STABLE) == "stable"


def test_example1_has_no_super_strong_equilibrium():
    g = example1()
    C = all_coalitions(3)
    assert not any(is_C_stable(g, a, C).stable for a in all_allocations(g))


def test_replay_rejects_inconsistent_deviation():
    g = example1()
    a = Allocation.from_groups([[1, 2], [3]])
    wrong_origin = Deviation(frozenset([1]), ((1, 1, 0),))
    with pytest.raises(InconsistentWitnessError):
        replay_deviation(g, a, wrong_origin)
    wrong_members = Deviation(frozenset([1, 2]), ((1, 0, 1),))
    with pytest.raises(InconsistentWitnessError):
        replay_deviation(g, a, wrong_members)
    # {3} wechselt allein auf r1: Kosten 1 -> 3
    with pytest.raises(InconsistentWitnessError):
        validated_report(g, a, Deviation(frozenset([3]), ((3, 1, 0),)))


def test_deviation_describe():
    dev = Deviation(frozenset([1, 2]), ((1, 0, 0), (2, 0, 1)))
    assert dev.describe() == "1->2:1"
    assert dev.counts == {(0, 0): 1, (0, 1): 1}
    assert dev.targets == {1: 0, 2: 1}


def test_deviation_text_lists_only_switches():
    g = example1()
    a = Allocation.from_groups([[1, 2], [3]])
    report = is_c_stable_rsg(g, a, [1, 2])
    assert not report.stable
    stays = [move for move in report.deviation.moves if move[1] == move[2]]
    assert stays
    assert len(report.deviation.moves) == 2
    assert report.deviation.describe() == "1->2:1"
    assert str(report) == "unstable: coalition {1,2} deviation 1->2:1"


def test_budget_is_enforced():
    g = example1()
    a = Allocation.from_groups([[1, 2], [3]])
    assert deviation_space_size(a, [1, 2]) == 3
    with pytest.raises(BudgetExceededError):
        is_c_stable_rsg(g, a, [1, 2], budget=2)
    with pytest.raises(PreconditionError):
        is_c_stable_rsg(g, a, [])


@st.composite
def small_instances(draw, max_agents=5, max_resources=3):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    n = draw(st.integers(1, max_agents))
    # 3^5 Profile je Koalition sind fuer den schnellen Lauf zu viel
    m = draw(st.integers(1, max_resources if n < 5 else min(max_resources, 2)))
    return random_rsg(rng, n, m)


def _assert_oracles_agree(g):
    sg = rsg_to_strategic_game(g)
    agents = range(1, g.n_agents + 1)
    coalitions = [c for size in agents for c in itertools.combinations(agents, size)]
    for a in all_allocations(g):
        for c in coalitions:
            rsg_report = is_c_stable_rsg(g, a, c)
            generic = is_c_stable_generic(sg, a.assignment, c)
            assert rsg_report.stable == generic.stable
            if not rsg_report.stable:
                assert is_profitable(rsg_report.before, rsg_report.after)


@given(small_instances())
@settings(max_examples=40, deadline=None)
def test_rsg_oracle_matches_generic_search(g):
    _assert_oracles_agree(g)


@pytest.mark.slow
@given(st.integers(0, 2**32 - 1))
@settings(max_examples=5, deadline=None)
def test_rsg_oracle_matches_generic_search_five_agents_three_resources(seed):
    _assert_oracles_agree(random_rsg(random.Random(seed), 5, 3))


def _increasing_tables(n):
    return list(itertools.combinations(range(1, n + 3), n))


def _criterion_cases(n, sample=None, seed=0):
    tables = _increasing_tables(n)
    agents = range(1, n + 1)
    coalitions = [c for size in agents for c in itertools.combinations(agents, size)]
    pairs = list(itertools.product(tables, repeat=2))
    if sample is not None:
        # identische Tabellen haben immer genau eine low-Ressource
        pairs = random.Random(seed).sample(pairs, sample) + [(t, t) for t in tables[:4]]
    for f1, f2 in pairs:
        g = Rsg(n, (f1, f2))
        d = derive_rsg(g)
        if d.t1 != (0, 1):
            continue
        for a in all_allocations(g):
            if not is_nash_by_characterization(g, d, a):
                continue
            loads = a.loads
            if sorted(load - q for load, q in zip(loads, d.quota)) != [-1, 0]:
                continue
            yield g, d, a, coalitions


@pytest.mark.parametrize("n", [2, 3, 4])
def test_two_resource_criterion_matches_exhaustive_check(n):
    checked = 0
    for g, d, a, coalitions in _criterion_cases(n):
        for c in coalitions:
            assert lemma_c123_check(g, d, a, c) == is_c_stable_rsg(g, a, c).stable, (g, a, c)
            checked += 1
    assert checked > 0


@pytest.mark.slow
@pytest.mark.parametrize("n", [5, 6])
def test_two_resource_criterion_matches_exhaustive_check_large(n):
    for g, d, a, coalitions in _criterion_cases(n):
        for c in coalitions:
            assert lemma_c123_check(g, d, a, c) == is_c_stable_rsg(g, a, c).stable, (g, a, c)


@pytest.mark.slow
def test_two_resource_criterion_matches_exhaustive_check_seven_agents():
    # 36 Tabellen je Ressource, 1296 Paare; 30 davon gezogen
    checked = 0
    for g, d, a, coalitions in _criterion_cases(7, sample=30, seed=7):
        for c in coalitions:
            assert lemma_c123_check(g, d, a, c) == is_c_stable_rsg(g, a, c).stable, (g, a, c)
            checked += 1
    assert checked > 0


def test_two_resource_criterion_preconditions():
    g = example1()
    d = derive_rsg(g)
    with pytest.raises(PreconditionError):
        # Last (3, 0) liegt bei keiner Ressource auf Quote - 1
        lemma_c123_check(g, d, Allocation.from_groups([[1, 2, 3], []]), [1])
    h = Rsg(2, ((1, 3), (2, 3)))
    with pytest.raises(PreconditionError):
        lemma_c123_check(h, derive_rsg(h), Allocation.from_groups([[1], [2]]), [1])


def test_gamma_beta_dominance():
    g = example1()
    C = CoalitionStructure.of(3, [[1, 2], [1, 2, 3]])
    together = Allocation.from_groups([[1, 2], [3]])
    split = Allocation.from_groups([[1, 3], [2]])
    assert gamma_value(together, C) == 3
    assert gamma_value(split, C) == 4
    assert beta_value(g, together) == 3
    assert gb_dominates(split, together, g, C)
    assert not gb_dominates(together, split, g, C)
    crowded = Allocation.from_groups([[1, 2, 3], []])
    assert gamma_value(crowded, C) == 2
    assert beta_value(g, crowded) == 3


@st.composite
def dominance_cases(draw):
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    n = draw(st.integers(1, 5))
    m = draw(st.integers(1, 3))
    g = random_rsg(rng, n, m)
    C = random_laminar_structure(rng, n)
    assignment = st.lists(st.integers(0, m - 1), min_size=n, max_size=n).map(tuple)
    triple = tuple(Allocation(draw(assignment), m) for _ in range(3))
    return g, C, triple


@given(dominance_cases())
@settings(max_examples=200, deadline=None)
def test_gamma_beta_dominance_is_strict_partial_order(case):
    g, C, (x, y, z) = case
    assert not gb_dominates(x, x, g, C)
    assert not (gb_dominates(x, y, g, C) and gb_dominates(y, x, g, C))
    if gb_dominates(x, y, g, C) and gb_dominates(y, z, g, C):
        assert gb_dominates(x, z, g, C)

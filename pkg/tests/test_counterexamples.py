import random

import pytest

from exceptions import BudgetExceededError, PreconditionError, RefutationError
from game_model import derive_rsg, is_nash_by_characterization
from coalition_structures import is_laminar, singleton_structure
from stability import is_profitable
from construction import construct_nash
from counterexamples import (
    EXAMPLE2_AGENTS,
    FIXTURE_NAMES,
    Certificate,
    Claim,
    certify_no_equilibrium,
    check_example2_constraints,
    fixture_example2,
    get_fixture,
    refute_example2,
    replay_certificate,
    verify_no_equilibrium,
)
from reproduction import example2_nash_sample


@pytest.fixture(scope="module")
def example2():
    fixture = fixture_example2()
    return fixture, derive_rsg(fixture.game)


@pytest.mark.parametrize("name, total", [("example1", 8), ("contiguous", 64), ("centralized", 32)])
def test_certificates(name, total):
    fixture = get_fixture(name)
    certificate = verify_no_equilibrium(fixture)
    assert certificate.holds
    assert certificate.total == total
    assert len(certificate.lines) == total
    assert replay_certificate(fixture.game, fixture.structure, certificate)
    for line in certificate.lines:
        assert line.report.coalition in fixture.structure
        assert is_profitable(line.report.before, line.report.after)
    assert len(certificate.text().splitlines()) == total
    assert " -> " in str(certificate.lines[0])


def test_fixture_claims():
    assert FIXTURE_NAMES == ("example1", "contiguous", "centralized", "example2")
    assert get_fixture("example1").claim is Claim.NO_SUPER_STRONG
    assert get_fixture("contiguous").claim is Claim.NO_CONTIGUOUS
    assert get_fixture("centralized").claim is Claim.NO_CENTRALIZED
    with pytest.raises(PreconditionError):
        get_fixture("nope")


def test_certificate_stops_at_stable_allocation():
    fixture = get_fixture("example1")
    certificate = certify_no_equilibrium(fixture.game, singleton_structure(3))
    assert not certificate.holds
    assert certificate.stable_allocation is not None
    assert not replay_certificate(fixture.game, singleton_structure(3), certificate)


def test_replay_rejects_tampered_certificate():
    fixture = get_fixture("example1")
    certificate = verify_no_equilibrium(fixture)
    truncated = Certificate(certificate.lines[:-1], certificate.total)
    assert not replay_certificate(fixture.game, fixture.structure, truncated)
    duplicated = Certificate(certificate.lines[:-1] + certificate.lines[:1], certificate.total)
    assert not replay_certificate(fixture.game, fixture.structure, duplicated)


def test_certificate_budget():
    fixture = get_fixture("contiguous")
    with pytest.raises(BudgetExceededError):
        certify_no_equilibrium(fixture.game, fixture.structure, budget=10)


# === GROSSE LAMINARE INSTANZ ===

def test_example2_constraints(example2):
    fixture, d = example2
    assert check_example2_constraints(fixture, d) == []
    assert fixture.game.n_agents == EXAMPLE2_AGENTS
    assert d.alpha == 100
    assert d.low_count == 1001
    x, y, z = (fixture.resource_groups[k][0] for k in ("x", "y", "z"))
    assert (d.quota[x], d.quota[y], d.quota[z]) == (53, 8, 7)
    assert is_laminar(fixture.structure)


def test_example2_refutes_constructed_nash(example2):
    fixture, d = example2
    a = construct_nash(fixture.game, d)
    refutation = refute_example2(fixture, a, d)
    assert refutation.coalition in fixture.structure
    assert is_profitable(refutation.report.before, refutation.report.after)


@pytest.mark.parametrize("mode", [0, 1, 2])
def test_example2_refutes_random_nash(example2, mode):
    fixture, d = example2
    rng = random.Random(mode)
    for _ in range(5):
        a = example2_nash_sample(fixture, d, rng, mode)
        assert is_nash_by_characterization(fixture.game, d, a)
        refutation = refute_example2(fixture, a, d)
        assert refutation.step in (1, 2, 5)
        assert refutation.coalition in fixture.structure


def test_example2_steps_by_mode(example2):
    fixture, d = example2
    rng = random.Random(7)
    assert refute_example2(fixture, example2_nash_sample(fixture, d, rng, 1), d).step == 1
    assert refute_example2(fixture, example2_nash_sample(fixture, d, rng, 2), d).step == 5


@pytest.mark.slow
def test_example2_thousand_samples(example2):
    fixture, d = example2
    rng = random.Random(2024)
    for index in range(1000):
        a = example2_nash_sample(fixture, d, rng, index % 3)
        try:
            refute_example2(fixture, a, d)
        except RefutationError as exc:
            pytest.fail(f"sample {index}: {exc}")

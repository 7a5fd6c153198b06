"""
Nichtexistenz-Instanzen mit maschinell pruefbaren Zertifikaten

- kleine Instanzen: alle m^n Allokationen werden mit einer profitablen Abweichung widerlegt
- grosse laminare Instanz (14052 Agenten, 2001 Ressourcen): beweisgefuehrte Widerlegung je Nash-Allokation
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Tuple

from config import SEARCH_BUDGET
from exceptions import (
    BudgetExceededError,
    InconsistentWitnessError,
    PreconditionError,
    RefutationError,
)
from game_model import (
    Allocation,
    Rsg,
    RsgDerived,
    all_allocations,
    classify_low_high,
    derive_rsg,
)
from coalition_structures import (
    Circle,
    CoalitionStructure,
    PathWitness,
    PlanarWitness,
    all_coalitions,
    format_coalition,
    is_contiguous_order,
    is_laminar,
    verify_embedding,
)
from stability import (
    Deviation,
    StabilityReport,
    is_C_stable,
    replay_deviation,
    is_profitable,
    validated_report,
)

logger = logging.getLogger(__name__)


class Claim(str, Enum):
    NO_SUPER_STRONG = "no-super-strong"
    NO_LAMINAR = "no-laminar"
    NO_CONTIGUOUS = "no-contiguous"
    NO_CENTRALIZED = "no-centralized"


@dataclass(frozen=True)
class Fixture:
    name: str
    game: Rsg
    structure: CoalitionStructure
    claim: Claim
    path: Optional[PathWitness] = None
    embedding: Optional[PlanarWitness] = None
    resource_groups: Mapping[str, Tuple[int, ...]] = field(default_factory=dict, compare=False)
    blocks: Tuple[FrozenSet[int], ...] = ()


# === FIXTURES ===

def fixture_example1() -> Fixture:
    """3 Agenten, zwei identische lineare Ressourcen: kein super strong Gleichgewicht"""
    table = (1, 2, 3)
    return Fixture(
        name="example1",
        game=Rsg(3, (table, table)),
        structure=all_coalitions(3),
        claim=Claim.NO_SUPER_STRONG,
    )


def fixture_two_resource_contiguous() -> Fixture:
    """Zwei Ressourcen, sechs Agenten auf einem Pfad: kein zusammenhaengendes Gleichgewicht"""
    n = 6
    game = Rsg(n, ((1, 2, 4, 5, 6, 7), (1, 2, 3, 4, 5, 6)))
    pairs = [[1, 2], [3, 4], [5, 6], [1, 2, 3], [4, 5, 6]]
    structure = CoalitionStructure.of(n, [[j] for j in range(1, n + 1)] + pairs)
    return Fixture(
        name="contiguous",
        game=game,
        structure=structure,
        claim=Claim.NO_CONTIGUOUS,
        path=PathWitness(tuple(range(1, n + 1))),
    )


def fixture_two_identical_centralized() -> Fixture:
    """Zwei identische Ressourcen, fuenf Agenten in der Ebene: kein zentriertes Gleichgewicht"""
    n = 5
    table = (1, 2, 3, 4, 5)
    structure = CoalitionStructure.of(
        n,
        [[j] for j in range(1, n + 1)]
        + [[1, 2], [3, 4], [5, 4], [1, 2, 3, 5], [5, 2, 3, 4]],
    )
    positions = {
        1: (Fraction(4), Fraction(4)),
        2: (Fraction(4), Fraction(3)),
        3: (Fraction(1), Fraction(3)),
        4: (Fraction(0), Fraction(3, 2)),
        5: (Fraction(2), Fraction(0)),
    }
    circles = {frozenset([j]): Circle(j, Fraction(1, 4)) for j in range(1, n + 1)}
    circles.update({
        frozenset([1, 2]): Circle(1, Fraction(1)),
        frozenset([1, 2, 3, 5]): Circle(1, Fraction(20)),
        frozenset([3, 4]): Circle(3, Fraction(13, 4)),
        frozenset([2, 3, 4, 5]): Circle(5, Fraction(13)),
        frozenset([4, 5]): Circle(5, Fraction(25, 4)),
    })
    return Fixture(
        name="centralized",
        game=Rsg(n, (table, table)),
        structure=structure,
        claim=Claim.NO_CENTRALIZED,
        embedding=PlanarWitness(positions, circles),
    )


# Parameter der grossen laminaren Instanz
EXAMPLE2_AGENTS = 14052
EXAMPLE2_Y = 1000
EXAMPLE2_Z = 1000
EXAMPLE2_BLOCKS = 6
EXAMPLE2_ALPHA = 100


def _stepped_table(linear_until: int, below_quota: int, n: int) -> Tuple[int, ...]:
    """f(q) = q bis linear_until, dann below_quota, dann alpha, danach +1 je Agent"""
    head = list(range(1, linear_until + 1)) + [below_quota, EXAMPLE2_ALPHA]
    tail = range(EXAMPLE2_ALPHA + 1, EXAMPLE2_ALPHA + 1 + n - len(head))
    return tuple(head) + tuple(tail)


def fixture_example2() -> Fixture:
    """
    Laminare Instanz ohne Gleichgewicht: x mit Quote 53, 1000 y mit Quote 8,
    1000 z mit Quote 7; beta_x=98 > beta_y=97 > beta_z=96 > f_x(51)=51.
    C = sechs disjunkte Bloecke der Groesse 2342, alle Einzelkoalitionen und N.
    """
    n = EXAMPLE2_AGENTS
    x_table = _stepped_table(51, 98, n)
    y_table = _stepped_table(6, 97, n)
    z_table = _stepped_table(5, 96, n)
    tables = (x_table,) + (y_table,) * EXAMPLE2_Y + (z_table,) * EXAMPLE2_Z
    names = ("x",) + tuple(f"y{k}" for k in range(1, EXAMPLE2_Y + 1)) + tuple(f"z{k}" for k in range(1, EXAMPLE2_Z + 1))
    game = Rsg(n, tables, names)

    size = n // EXAMPLE2_BLOCKS
    blocks = tuple(frozenset(range(k * size + 1, (k + 1) * size + 1)) for k in range(EXAMPLE2_BLOCKS))
    coalitions = list(blocks) + [[j] for j in range(1, n + 1)] + [range(1, n + 1)]
    structure = CoalitionStructure.of(n, coalitions)
    return Fixture(
        name="example2",
        game=game,
        structure=structure,
        claim=Claim.NO_LAMINAR,
        resource_groups={
            "x": (0,),
            "y": tuple(range(1, EXAMPLE2_Y + 1)),
            "z": tuple(range(EXAMPLE2_Y + 1, EXAMPLE2_Y + EXAMPLE2_Z + 1)),
        },
        blocks=blocks,
    )


FIXTURES: Dict[str, Callable[[], Fixture]] = {
    "example1": fixture_example1,
    "contiguous": fixture_two_resource_contiguous,
    "centralized": fixture_two_identical_centralized,
    "example2": fixture_example2,
}
FIXTURE_NAMES = tuple(FIXTURES)


def get_fixture(name: str) -> Fixture:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise PreconditionError(f"Unbekannte Instanz '{name}' (bekannt: {', '.join(FIXTURE_NAMES)})") from None


def check_example2_constraints(fixture: Fixture, d: Optional[RsgDerived] = None) -> List[str]:
    """Prueft alle Bedingungen der grossen Instanz exakt; leere Liste = alles erfuellt"""
    g = fixture.game
    d = d or derive_rsg(g)
    x = fixture.resource_groups["x"][0]
    y = fixture.resource_groups["y"][0]
    z = fixture.resource_groups["z"][0]
    failures = []
    if g.n_agents != EXAMPLE2_AGENTS or g.n_resources != 1 + EXAMPLE2_Y + EXAMPLE2_Z:
        failures.append("Groesse")
    if d.alpha != EXAMPLE2_ALPHA:
        failures.append(f"alpha = {d.alpha}")
    if d.t2:
        failures.append(f"{len(d.t2)} Ressourcen vom Typ 2")
    expected_quota = {"x": 53, "y": 8, "z": 7}
    for group, q in expected_quota.items():
        if any(d.quota[i] != q for i in fixture.resource_groups[group]):
            failures.append(f"Quote {group} != {q}")
    if not d.beta[x] > d.beta[y] > d.beta[z] > g.cost(x, d.quota[x] - 2):
        failures.append("beta-Kette verletzt")
    if d.low_count != 1001:
        failures.append(f"{d.low_count} low-Ressourcen statt 1001")
    if any(len(b) != EXAMPLE2_AGENTS // EXAMPLE2_BLOCKS for b in fixture.blocks):
        failures.append("Blockgroesse")
    if not is_laminar(fixture.structure):
        failures.append("Struktur nicht laminar")
    return failures


# === WIDERLEGUNG DER GROSSEN INSTANZ ===

@dataclass(frozen=True)
class Refutation:
    step: int
    report: StabilityReport

    @property
    def coalition(self) -> FrozenSet[int]:
        return self.report.coalition

    @property
    def deviation(self) -> Deviation:
        return self.report.deviation


def _deviation(a: Allocation, coalition: FrozenSet[int], targets: Mapping[int, int]) -> Deviation:
    moves = tuple(
        (j, a.resource_of(j), targets.get(j, a.resource_of(j)))
        for j in sorted(coalition)
    )
    return Deviation(coalition, moves)


def refute_example2(fixture: Fixture, a: Allocation, d: Optional[RsgDerived] = None) -> Refutation:
    """
    Profitable Abweichung einer Koalition aus C fuer eine Nash-Allokation a,
    gefunden entlang der Beweisschritte; jede Abweichung wird nachgerechnet.
    """
    g = fixture.game
    d = d or derive_rsg(g)
    low, high = classify_low_high(g, d, a)
    x = fixture.resource_groups["x"][0]
    ys = fixture.resource_groups["y"]
    zs = fixture.resource_groups["z"]
    everyone = frozenset(range(1, g.n_agents + 1))
    groups = a.groups

    def finish(step: int, coalition: FrozenSet[int], targets: Mapping[int, int]) -> Refutation:
        if coalition not in fixture.structure:
            raise RefutationError(f"Koalition aus Schritt {step} liegt nicht in C")
        report = validated_report(g, a, _deviation(a, coalition, targets))
        logger.debug("Widerlegung in Schritt %d durch %d Agenten", step, len(coalition))
        return Refutation(step, report)

    # (1) x high: zwei low-Ressourcen tauschen ihre Belegung gegen Agenten von x
    if x in high:
        first, second = sorted(low)[:2]
        from_x = sorted(groups[x])
        n1 = from_x[:d.quota[first]]
        n2 = from_x[d.quota[first]:d.quota[first] + d.quota[second]]
        targets = {j: first for j in n1}
        targets.update({j: second for j in n2})
        targets.update({j: x for j in groups[first] | groups[second]})
        return finish(1, everyone, targets)

    # (2) mindestens 8 hohe y: Rotation x -> y -> z -> x
    high_y = sorted(i for i in ys if i in high)
    if len(high_y) >= 8:
        rotate_y = high_y[:7]
        rotate_z = sorted(i for i in zs if i in low)[:8]
        targets: Dict[int, int] = {}
        from_x = sorted(groups[x])[:49]
        for k, j in enumerate(from_x):
            targets[j] = rotate_y[k // 7]
        from_y = sorted(j for i in rotate_y for j in groups[i])
        for k, j in enumerate(from_y):
            targets[j] = rotate_z[k // 7]
        for i in rotate_z:
            targets.update({j: x for j in groups[i]})
        return finish(2, everyone, targets)

    # (3) Block mit den meisten Agenten auf hohen z
    high_z = [i for i in zs if i in high]
    on_high_z = frozenset(j for i in high_z for j in groups[i])
    block = max(fixture.blocks, key=lambda b: (len(b & on_high_z), -min(b)))

    # (4) hohes z mit mindestens zwei Blockmitgliedern
    z = next((i for i in high_z if len(groups[i] & block) >= 2), None)
    if z is None:
        raise RefutationError("Kein hohes z mit zwei Agenten desselben Blocks")
    j, j2 = sorted(groups[z] & block)[:2]

    # (5) low-Ressource in {x} + y mit hoechstens einem Blockmitglied
    for y in sorted(i for i in low if i == x or i in ys):
        inside = sorted(groups[y] & block)
        if not inside:
            return finish(5, block, {j: y})
        if len(inside) == 1:
            return finish(5, block, {j: y, j2: y, inside[0]: z})

    # (6) Zaehlschranke: kann nicht eintreten
    raise RefutationError(f"Keine Stufe greift fuer {a}")


# === ZERTIFIKATE ===

@dataclass(frozen=True)
class CertificateLine:
    allocation: Allocation
    report: StabilityReport

    def __str__(self) -> str:
        return (
            f"{self.allocation} -> {format_coalition(self.report.coalition)}"
            f" -> {self.report.deviation.describe()}"
        )


@dataclass(frozen=True)
class Certificate:
    """Je Allokation eine profitable Abweichung; stable_allocation gesetzt, falls eine stabile gefunden wurde"""
    lines: Tuple[CertificateLine, ...]
    total: int
    stable_allocation: Optional[Allocation] = None

    @property
    def holds(self) -> bool:
        return self.stable_allocation is None and len(self.lines) == self.total

    def text(self) -> str:
        return "\n".join(str(line) for line in self.lines)


def certify_no_equilibrium(g: Rsg, C: CoalitionStructure, budget: Optional[int] = None) -> Certificate:
    """Widerlegt alle m^n Allokationen oder liefert die erste C-stabile"""
    budget = SEARCH_BUDGET if budget is None else budget
    total = g.n_resources ** g.n_agents
    if total > budget:
        raise BudgetExceededError("Exhaustives Zertifikat", total, budget)
    lines = []
    for a in all_allocations(g):
        report = is_C_stable(g, a, C)
        if report.stable:
            return Certificate(tuple(lines), total, a)
        lines.append(CertificateLine(a, report))
    logger.info("Zertifikat: %d von %d Allokationen widerlegt", len(lines), total)
    return Certificate(tuple(lines), total)


def verify_no_equilibrium(fixture: Fixture, budget: Optional[int] = None) -> Certificate:
    """Prueft zuerst die Zeugen der Instanz, dann alle Allokationen"""
    C = fixture.structure
    if fixture.path is not None and not is_contiguous_order(C, fixture.path.order):
        raise InconsistentWitnessError(f"Pfad {fixture.path} passt nicht zu {fixture.name}")
    if fixture.embedding is not None and not verify_embedding(C, fixture.embedding):
        raise InconsistentWitnessError(f"Einbettung passt nicht zu {fixture.name}")
    return certify_no_equilibrium(fixture.game, C, budget)


def replay_certificate(g: Rsg, C: CoalitionStructure, certificate: Certificate) -> bool:
    """Unabhaengige Nachpruefung: alle Allokationen genau einmal, jede Abweichung aus C und profitabel"""
    if not certificate.holds or certificate.total != g.n_resources ** g.n_agents:
        return False
    seen = {line.allocation for line in certificate.lines}
    if len(seen) != certificate.total:
        return False
    for line in certificate.lines:
        report = line.report
        if report.coalition not in C or report.deviation.coalition != report.coalition:
            return False
        try:
            before, after = replay_deviation(g, line.allocation, report.deviation)
        except InconsistentWitnessError:
            return False
        if not is_profitable(before, after):
            return False
    return True

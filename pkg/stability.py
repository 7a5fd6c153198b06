"""
Exakte Stabilitaetspruefung: profitable Abweichungen von Koalitionen

Profitabel heisst: kein Mitglied verschlechtert sich, mindestens eines
verbessert sich strikt. Fuer RSGs wird ueber Zaehlmatrizen
(Herkunftsressource -> Zielressource) aufgezaehlt, da Mitglieder derselben
Herkunft austauschbar sind.
"""
import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from math import comb, prod
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from config import DEVIATION_BUDGET
from exceptions import BudgetExceededError, InconsistentWitnessError, PreconditionError
from game_model import (
    Allocation,
    Number,
    Profile,
    Rsg,
    RsgDerived,
    StrategicGame,
    allocation_costs,
    compositions,
)
from coalition_structures import CoalitionStructure, format_coalition

logger = logging.getLogger(__name__)

Move = Tuple[int, int, int]     # (Agent, Herkunft, Ziel)


@dataclass(frozen=True)
class Deviation:
    """Gemeinsamer Wechsel einer Koalition; moves nach Agent sortiert"""
    coalition: FrozenSet[int]
    moves: Tuple[Move, ...]

    @property
    def counts(self) -> Dict[Tuple[int, int], int]:
        """(Herkunft, Ziel) -> Anzahl Mitglieder"""
        return dict(Counter((origin, target) for _, origin, target in self.moves))

    @property
    def targets(self) -> Dict[int, int]:
        return {agent: target for agent, _, target in self.moves}

    def describe(self) -> str:
        """Nur echte Wechsel; Mitglieder, die bleiben, stehen in moves"""
        parts = [
            f"{origin + 1}->{target + 1}:{count}"
            for (origin, target), count in sorted(self.counts.items())
            if origin != target
        ]
        return " ".join(parts)


@dataclass(frozen=True)
class StabilityReport:
    """
    Ergebnis einer Stabilitaetspruefung. Bei RSGs sind before/after Kosten,
    bei Normalformspielen Payoffs; Reihenfolge wie sorted(coalition).
    """
    stable: bool
    coalition: Optional[FrozenSet[int]] = None
    deviation: Optional[Deviation] = None
    before: Tuple[Number, ...] = ()
    after: Tuple[Number, ...] = ()

    @property
    def members(self) -> Tuple[int, ...]:
        return tuple(sorted(self.coalition)) if self.coalition else ()

    def __str__(self) -> str:
        if self.stable:
            return "stable"
        return f"unstable: coalition {format_coalition(self.coalition)} deviation {self.deviation.describe()}"


STABLE = StabilityReport(stable=True)


def is_profitable(before: Sequence[Number], after: Sequence[Number]) -> bool:
    """Kosten: alle weakly besser, mindestens einer strikt"""
    return all(x <= y for x, y in zip(after, before)) and any(x < y for x, y in zip(after, before))


def apply_deviation(a: Allocation, dev: Deviation) -> Allocation:
    return a.moved(dev.targets)


def replay_deviation(g: Rsg, a: Allocation, dev: Deviation) -> Tuple[Tuple[Number, ...], Tuple[Number, ...]]:
    """Kosten der Mitglieder vor und nach der Abweichung, unabhaengig von der Suche neu berechnet"""
    members = sorted(dev.coalition)
    if sorted(agent for agent, _, _ in dev.moves) != members:
        raise InconsistentWitnessError("Abweichung passt nicht zur Koalition")
    if any(a.resource_of(agent) != origin for agent, origin, _ in dev.moves):
        raise InconsistentWitnessError("Abweichung passt nicht zur Allokation")
    costs_before = allocation_costs(g, a)
    costs_after = allocation_costs(g, apply_deviation(a, dev))
    return (
        tuple(costs_before[j - 1] for j in members),
        tuple(costs_after[j - 1] for j in members),
    )


def validated_report(g: Rsg, a: Allocation, dev: Deviation) -> StabilityReport:
    before, after = replay_deviation(g, a, dev)
    if not is_profitable(before, after):
        raise InconsistentWitnessError(
            f"Abweichung {dev.describe()} von {format_coalition(dev.coalition)} ist nicht profitabel"
        )
    return StabilityReport(False, dev.coalition, dev, before, after)


# === NORMALFORM ===

def is_c_stable_generic(g: StrategicGame, s: Profile, c: Iterable[int],
                        budget: Optional[int] = None) -> StabilityReport:
    """Durchsucht alle gemeinsamen Strategiewechsel von c (Payoffs: hoeher ist besser)"""
    members = sorted(set(c))
    if not members:
        raise PreconditionError("Leere Koalition")
    budget = DEVIATION_BUDGET if budget is None else budget
    size = prod(g.strategy_counts[j - 1] for j in members)
    if size > budget:
        raise BudgetExceededError(f"Koalition {format_coalition(members)}", size, budget)
    s = tuple(s)
    base = g.payoff(s)
    before = tuple(base[j - 1] for j in members)
    for choice in itertools.product(*(range(g.strategy_counts[j - 1]) for j in members)):
        profile = list(s)
        for j, strategy in zip(members, choice):
            profile[j - 1] = strategy
        profile = tuple(profile)
        if profile == s:
            continue
        payoff = g.payoff(profile)
        after = tuple(payoff[j - 1] for j in members)
        if all(y >= x for x, y in zip(before, after)) and any(y > x for x, y in zip(before, after)):
            moves = tuple((j, s[j - 1], strategy) for j, strategy in zip(members, choice))
            return StabilityReport(False, frozenset(members), Deviation(frozenset(members), moves), before, after)
    return STABLE


# === RSG ===

def deviation_space_size(a: Allocation, c: Iterable[int]) -> int:
    origins = Counter(a.resource_of(j) for j in c)
    m = a.n_resources
    return prod(comb(size + m - 1, m - 1) for size in origins.values())


def is_c_stable_rsg(g: Rsg, a: Allocation, c: Iterable[int],
                    budget: Optional[int] = None) -> StabilityReport:
    """
    Exakte c-Stabilitaet ueber Zaehlmatrizen. Teilzeilen werden verworfen,
    sobald eine Zielressource schon zu teuer fuer die Herkunft ist.
    """
    coalition = frozenset(c)
    if not coalition:
        raise PreconditionError("Leere Koalition")
    budget = DEVIATION_BUDGET if budget is None else budget
    size = deviation_space_size(a, coalition)
    if size > budget:
        raise BudgetExceededError(f"Koalition {format_coalition(coalition)}", size, budget)

    m = g.n_resources
    loads = a.loads
    groups: Dict[int, List[int]] = {}
    for j in sorted(coalition):
        groups.setdefault(a.resource_of(j), []).append(j)
    origins = sorted(groups)
    outside = list(loads)
    for r in origins:
        outside[r] -= len(groups[r])
    before_cost = {r: g.cost(r, loads[r]) for r in origins}
    options = [list(compositions(len(groups[r]), m)) for r in origins]

    def search(depth: int, column: List[int], rows: List[Tuple[int, ...]]) -> Optional[List[Tuple[int, ...]]]:
        if depth == len(origins):
            strictly = False
            for r, row in zip(origins, rows):
                for i, k in enumerate(row):
                    if k == 0:
                        continue
                    after = g.cost(i, outside[i] + column[i])
                    if after > before_cost[r]:
                        return None
                    if after < before_cost[r]:
                        strictly = True
            return rows if strictly else None
        r = origins[depth]
        limit = before_cost[r]
        for row in options[depth]:
            if any(k and g.cost(i, outside[i] + column[i] + k) > limit for i, k in enumerate(row)):
                continue
            found = search(depth + 1, [x + k for x, k in zip(column, row)], rows + [row])
            if found is not None:
                return found
        return None

    rows = search(0, [0] * m, [])
    if rows is None:
        return STABLE

    moves = []
    for r, row in zip(origins, rows):
        members = iter(groups[r])
        for target, k in enumerate(row):
            for _ in range(k):
                moves.append((next(members), r, target))
    dev = Deviation(coalition, tuple(sorted(moves)))
    return validated_report(g, a, dev)


def is_C_stable(g: Rsg, a: Allocation, C: CoalitionStructure,
                budget: Optional[int] = None) -> StabilityReport:
    """Erste verletzte Koalition in kanonischer Reihenfolge, sonst stabil"""
    for c in C:
        report = is_c_stable_rsg(g, a, c, budget)
        if not report.stable:
            return report
    return STABLE


# === KRITERIUM FUER ZWEI RESSOURCEN ===

def lemma_c123_check(g: Rsg, d: RsgDerived, a: Allocation, c: Iterable[int]) -> bool:
    """
    Stabilitaet von c bei zwei Typ-1-Ressourcen ohne Aufzaehlung.
    i = Ressource auf Quote, i' = Ressource auf Quote - 1.
    """
    if g.n_resources != 2 or d.t1 != (0, 1):
        raise PreconditionError("Kriterium gilt nur fuer zwei Ressourcen vom Typ 1")
    loads = a.loads
    if loads[0] == d.quota[0] and loads[1] == d.quota[1] - 1:
        full, low = 0, 1
    elif loads[1] == d.quota[1] and loads[0] == d.quota[0] - 1:
        full, low = 1, 0
    else:
        raise PreconditionError(f"Allokation {a} hat nicht genau eine Ressource auf Quote - 1")
    c = frozenset(c)
    on_full = len(a.groups[full] & c)
    on_low = len(a.groups[low] & c)
    beta_full, beta_low = d.beta[full], d.beta[low]

    if on_low == 0:
        return on_full <= 1
    if beta_full == beta_low:
        return on_full <= on_low + 1
    if beta_full < beta_low:
        return on_full <= on_low
    return True


# === GAMMA / BETA ===

def gamma_value(a: Allocation, C: Iterable[Iterable[int]]) -> int:
    """Summe ueber Koalitionen: auf wie vielen Ressourcen die Koalition vertreten ist"""
    return sum(len({a.resource_of(j) for j in c}) for c in C)


def beta_value(g: Rsg, a: Allocation) -> Number:
    return sum(g.cost(i, load) for i, load in enumerate(a.loads))


def gb_dominates(a_new: Allocation, a_old: Allocation, g: Rsg, C: Iterable[Iterable[int]]) -> bool:
    """gamma strikt groesser, oder gleich und beta strikt kleiner"""
    C = list(C)
    gamma_new, gamma_old = gamma_value(a_new, C), gamma_value(a_old, C)
    if gamma_new != gamma_old:
        return gamma_new > gamma_old
    return beta_value(g, a_new) < beta_value(g, a_old)

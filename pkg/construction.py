"""
Konstruktion von Gleichgewichten

- Nash-Allokation ueber die Quoten-Charakterisierung
- Round-Robin entlang eines Pfades (identische Ressourcen)
- Zweifaerbung laminarer Strukturen
- Laminares Gleichgewicht fuer zwei Ressourcen (drei Faelle, gamma-beta-Iteration)
- Exhaustive Suche mit Symmetriereduktion als Referenz
"""
import itertools
import logging
from dataclasses import dataclass
from math import comb, prod
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from config import CONSTRUCTION_CAP_FACTOR, SEARCH_BUDGET
from exceptions import BudgetExceededError, ConstructionError, PreconditionError
from game_model import (
    Allocation,
    Number,
    ResourceType,
    Rsg,
    RsgDerived,
    compositions,
    derive_rsg,
    is_nash_by_characterization,
)
from coalition_structures import (
    Coalition,
    CoalitionStructure,
    PathWitness,
    format_coalition,
    is_laminar,
)
from stability import (
    beta_value,
    gamma_value,
    gb_dominates,
    is_C_stable,
    lemma_c123_check,
)

logger = logging.getLogger(__name__)


# === NASH ===

def construct_nash(g: Rsg, d: Optional[RsgDerived] = None) -> Allocation:
    """
    Typ-2-Ressourcen auf Quote, Typ-1-Ressourcen auf Quote - 1, die ersten
    Typ-1-Ressourcen (Index-Reihenfolge) bekommen den Rest bis zur Quote.
    Agenten mit kleinster ID zuerst.
    """
    d = d or derive_rsg(g)
    loads = [
        q if t is ResourceType.TYPE2 else q - 1
        for q, t in zip(d.quota, d.resource_type)
    ]
    rest = g.n_agents - sum(loads)
    t1 = d.t1
    if not 1 <= rest <= len(t1):
        raise ConstructionError(f"Quoten erlauben keine Nash-Allokation (Rest {rest})")
    for i in t1[:rest]:
        loads[i] += 1
    assignment = []
    for i, load in enumerate(loads):
        assignment.extend([i] * load)
    a = Allocation(tuple(assignment), g.n_resources)
    if not is_nash_by_characterization(g, d, a):
        raise ConstructionError("Konstruierte Allokation ist kein Nash-Gleichgewicht")
    return a


def algorithm1_round_robin(g: Rsg, w: PathWitness) -> Allocation:
    """Agenten in Pfadreihenfolge reihum auf die Ressourcen 1..m verteilen"""
    if not g.is_identical():
        raise PreconditionError("Round-Robin braucht identische Ressourcen")
    if len(w.order) != g.n_agents:
        raise PreconditionError(f"Pfad hat {len(w.order)} statt {g.n_agents} Agenten")
    assignment = [0] * g.n_agents
    for position, agent in enumerate(w.order):
        assignment[agent - 1] = position % g.n_resources
    return Allocation(tuple(assignment), g.n_resources)


# === ZWEIFAERBUNG ===

@dataclass(frozen=True)
class LaminarForest:
    """Baum aus C, N und allen Einzelkoalitionen; Kinder nach kleinstem Mitglied sortiert"""
    root: Coalition
    tree: nx.DiGraph
    levels: Tuple[Tuple[Coalition, ...], ...]

    def mother(self, c: Coalition) -> Coalition:
        return next(iter(self.tree.predecessors(c)))

    def children(self, c: Coalition) -> List[Coalition]:
        return sorted(self.tree.successors(c), key=min)


def build_laminar_forest(C: CoalitionStructure) -> LaminarForest:
    if not is_laminar(C):
        raise PreconditionError("Struktur ist nicht laminar")
    root = C.agents
    nodes = set(C.coalitions) | {root} | {frozenset([j]) for j in root}
    tree = nx.DiGraph()
    tree.add_nodes_from(nodes)
    # Mutter = kleinste echte Obermenge; bei laminaren Familien eindeutig
    ordered = sorted(nodes, key=len)
    for index, c in enumerate(ordered):
        if c == root:
            continue
        mother = next(x for x in ordered[index + 1:] if c < x)
        tree.add_edge(mother, c)
    depth = nx.single_source_shortest_path_length(tree, root)
    levels: Dict[int, List[Coalition]] = {}
    for c, level in depth.items():
        levels.setdefault(level, []).append(c)
    return LaminarForest(
        root,
        tree,
        tuple(tuple(sorted(levels[s], key=min)) for s in sorted(levels)),
    )


@dataclass(frozen=True)
class TwoColoring:
    black: FrozenSet[int]
    white: FrozenSet[int]

    @property
    def k(self) -> int:
        return len(self.black)

    def imbalance(self, c: Iterable[int]) -> int:
        c = frozenset(c)
        return len(self.black & c) - len(self.white & c)

    def is_balanced_for(self, C: Iterable[Iterable[int]]) -> bool:
        return all(abs(self.imbalance(c)) <= 1 for c in C)


def two_color(subset: Iterable[int], C: CoalitionStructure) -> TwoColoring:
    """
    Teilt N' in k schwarze und den Rest weisse Agenten (|N'| = 2k-1 oder 2k),
    so dass jede Koalition hoechstens einen Agenten Unterschied hat.
    Ebene fuer Ebene: ueberschwarzes Kind tauscht mit einem Geschwister,
    das weiss ueberwiegt.
    """
    members = sorted(set(subset))
    if not members:
        raise PreconditionError("Zweifaerbung braucht mindestens einen Agenten")
    if any(not 1 <= j <= C.n_agents for j in members):
        raise PreconditionError("Agenten ausserhalb von 1..n")
    forest = build_laminar_forest(C)
    k = (len(members) + 1) // 2
    black: Set[int] = set(members[:k])
    white: Set[int] = set(members[k:])

    def balance(c: Coalition) -> int:
        return len(black & c) - len(white & c)

    swaps = 0
    for level in forest.levels[1:]:
        while True:
            offender = next((c for c in level if abs(balance(c)) >= 2), None)
            if offender is None:
                break
            sign = 1 if balance(offender) > 0 else -1
            sibling = next(
                (s for s in forest.children(forest.mother(offender)) if sign * balance(s) <= -1),
                None,
            )
            if sibling is None:
                raise ConstructionError(f"Kein Tauschpartner fuer {format_coalition(offender)}")
            surplus, deficit = (black, white) if sign > 0 else (white, black)
            out_agent = min(surplus & offender)
            in_agent = min(deficit & sibling)
            surplus.remove(out_agent)
            deficit.add(out_agent)
            deficit.remove(in_agent)
            surplus.add(in_agent)
            swaps += 1
            logger.debug("Tausch %d <-> %d (%s / %s)", out_agent, in_agent,
                         format_coalition(offender), format_coalition(sibling))
            if swaps > len(members) * len(forest.tree):
                raise ConstructionError("Zweifaerbung terminiert nicht")
    coloring = TwoColoring(frozenset(black), frozenset(white))
    if coloring.k != k or not coloring.is_balanced_for(C):
        raise ConstructionError("Zweifaerbung verletzt die Balance")
    return coloring


# === ZWEI RESSOURCEN, LAMINAR ===

@dataclass(frozen=True)
class LaminarStep:
    allocation: Allocation
    coalition: Coalition
    rule: str           # "C1" oder "C3"
    gamma: int
    beta: Number


@dataclass(frozen=True)
class LaminarConstruction:
    allocation: Allocation
    case: int
    steps: Tuple[LaminarStep, ...]


def _full_and_low(d: RsgDerived, a: Allocation) -> Optional[Tuple[int, int]]:
    loads = a.loads
    for full, low in ((0, 1), (1, 0)):
        if loads[full] == d.quota[full] and loads[low] == d.quota[low] - 1:
            return full, low
    return None


def _rewire_c1(a: Allocation, c: Coalition, full: int, low: int) -> Allocation:
    first, second = sorted(a.groups[full] & c)[:2]
    return a.moved({second: low})


def _rewire_c3(a: Allocation, C: CoalitionStructure, c: Coalition, full: int, low: int) -> Allocation:
    on_full = a.groups[full] & c
    on_low = sorted(a.groups[low] & c)
    k = len(on_low) + 1

    # fuer jedes j auf low: kleinstes c~ in C mit j darin, c~ in c, c~ trifft full
    chosen: Set[int] = set()
    for j in on_low:
        candidates = [x for x in C if j in x and x <= c and x & on_full]
        smallest = min(candidates, key=len)
        chosen.add(min(smallest & on_full))
    for j in sorted(on_full):
        if len(chosen) >= k:
            break
        chosen.add(j)
    if len(chosen) != k:
        raise ConstructionError(f"Auswahl fuer {format_coalition(c)} hat {len(chosen)} statt {k} Agenten")
    selected = chosen | set(on_low)
    coloring = two_color(selected, C)
    moves = {j: low for j in coloring.black}
    moves.update({j: full for j in coloring.white})
    return a.moved(moves)


def trace_two_resource_laminar_eq(g: Rsg, C: CoalitionStructure,
                                  verify: bool = True) -> LaminarConstruction:
    """Laminares Gleichgewicht fuer m = 2 mit allen Zwischenschritten"""
    if g.n_resources != 2:
        raise PreconditionError("Konstruktion nur fuer genau zwei Ressourcen")
    if not is_laminar(C):
        raise PreconditionError("Struktur ist nicht laminar")
    d = derive_rsg(g)
    steps: List[LaminarStep] = []

    if d.t2:
        case = 1
        a = construct_nash(g, d)
    elif d.beta[0] == d.beta[1]:
        case = 2
        small, large = sorted((0, 1), key=lambda i: (d.quota[i], i))
        coloring = two_color(C.agents, C)
        on_small = sorted(coloring.black)[:d.quota[small]]
        assignment = [large] * g.n_agents
        for j in on_small:
            assignment[j - 1] = small
        a = Allocation(tuple(assignment), 2)
    else:
        case = 3
        a = construct_nash(g, d)
        cap = max(1, g.n_resources * len(C) * g.n_agents ** 2) * CONSTRUCTION_CAP_FACTOR
        while True:
            sides = _full_and_low(d, a)
            if sides is None:
                break
            full, low = sides
            violated = next((c for c in C if not lemma_c123_check(g, d, a, c)), None)
            if violated is None:
                break
            if len(steps) >= cap:
                raise ConstructionError(f"Iterationsgrenze {cap} erreicht")
            if not a.groups[low] & violated:
                rule, nxt = "C1", _rewire_c1(a, violated, full, low)
            else:
                rule, nxt = "C3", _rewire_c3(a, C, violated, full, low)
            if not is_nash_by_characterization(g, d, nxt):
                raise ConstructionError(f"Schritt {rule} an {format_coalition(violated)} verlaesst Nash")
            if not gb_dominates(nxt, a, g, C):
                raise ConstructionError(f"Schritt {rule} an {format_coalition(violated)} dominiert nicht")
            a = nxt
            steps.append(LaminarStep(a, violated, rule, gamma_value(a, C), beta_value(g, a)))
            logger.debug("Schritt %d: %s an %s -> %s", len(steps), rule, format_coalition(violated), a)

    if not is_nash_by_characterization(g, d, a):
        raise ConstructionError(f"Fall {case} liefert kein Nash-Gleichgewicht")
    if verify:
        report = is_C_stable(g, a, C)
        if not report.stable:
            raise ConstructionError(f"Fall {case} liefert keine C-stabile Allokation: {report}")
    logger.info("Zwei-Ressourcen-Konstruktion: Fall %d, %d Schritte", case, len(steps))
    return LaminarConstruction(a, case, tuple(steps))


def construct_two_resource_laminar_eq(g: Rsg, C: CoalitionStructure) -> Allocation:
    return trace_two_resource_laminar_eq(g, C).allocation


# === SUCHE ===

def membership_classes(C: CoalitionStructure) -> List[Tuple[int, ...]]:
    """Agenten mit identischer Koalitionszugehoerigkeit sind austauschbar"""
    signature: Dict[Tuple[int, ...], List[int]] = {}
    for j in sorted(C.agents):
        key = tuple(index for index, c in enumerate(C.coalitions) if j in c)
        signature.setdefault(key, []).append(j)
    return [tuple(members) for members in signature.values()]


def search_space_size(g: Rsg, C: CoalitionStructure) -> int:
    m = g.n_resources
    return prod(comb(len(cls) + m - 1, m - 1) for cls in membership_classes(C))


def iter_symmetric_allocations(g: Rsg, C: CoalitionStructure) -> Iterable[Allocation]:
    """Eine Allokation je Lastverteilung pro Zugehoerigkeitsklasse"""
    m = g.n_resources
    classes = membership_classes(C)
    per_class = [list(compositions(len(cls), m)) for cls in classes]
    for choice in itertools.product(*per_class):
        assignment = [0] * g.n_agents
        for cls, counts in zip(classes, choice):
            members = iter(cls)
            for resource, count in enumerate(counts):
                for _ in range(count):
                    assignment[next(members) - 1] = resource
        yield Allocation(tuple(assignment), m)


def find_equilibrium_by_search(g: Rsg, C: CoalitionStructure,
                               budget: Optional[int] = None) -> Optional[Allocation]:
    """Erste C-stabile Allokation oder None, wenn keine existiert"""
    budget = SEARCH_BUDGET if budget is None else budget
    size = search_space_size(g, C)
    if size > budget:
        raise BudgetExceededError("Allokationssuche", size, budget)
    logger.info("Suche ueber %d Allokationen (Symmetrieklassen)", size)
    for a in iter_symmetric_allocations(g, C):
        if is_C_stable(g, a, C).stable:
            return a
    return None


def is_round_robin_balanced(a: Allocation, low: Iterable[int], high: Iterable[int],
                            C: CoalitionStructure) -> bool:
    """|a_i & c| <= |a_i' & c| + 1 fuer jede Koalition, jede high-Ressource i und low-Ressource i'"""
    low, high = list(low), list(high)
    for c in C:
        for i in high:
            for i2 in low:
                if len(a.groups[i] & c) > len(a.groups[i2] & c) + 1:
                    return False
    return True

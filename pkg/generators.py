"""
Zufallsinstanzen fuer Eigenschaftstests und Reproduktionslaeufe (immer mit explizitem random.Random)
"""
import random
from typing import FrozenSet, List, Optional, Sequence, Tuple

from exceptions import PreconditionError
from game_model import Allocation, Rsg, RsgDerived
from coalition_structures import CoalitionStructure, PathWitness


def random_table(rng: random.Random, n: int, max_step: int = 3) -> Tuple[int, ...]:
    """Streng steigende, positive Kostentabelle der Laenge n"""
    value = 0
    table = []
    for _ in range(n):
        value += rng.randint(1, max_step)
        table.append(value)
    return tuple(table)


def random_rsg(rng: random.Random, n: int, m: int, identical: bool = False, max_step: int = 3) -> Rsg:
    if identical:
        table = random_table(rng, n, max_step)
        return Rsg(n, (table,) * m)
    return Rsg(n, tuple(random_table(rng, n, max_step) for _ in range(m)))


def random_two_resource_rsg(rng: random.Random, n: int, identical: bool = False, max_step: int = 3) -> Rsg:
    return random_rsg(rng, n, 2, identical, max_step)


def random_subset(rng: random.Random, agents: Sequence[int], min_size: int = 1) -> FrozenSet[int]:
    agents = list(agents)
    size = rng.randint(min_size, len(agents))
    return frozenset(rng.sample(agents, size))


def random_partition_structure(rng: random.Random, n: int) -> CoalitionStructure:
    order = list(range(1, n + 1))
    rng.shuffle(order)
    cuts = sorted(rng.sample(range(1, n), rng.randint(0, n - 1))) if n > 1 else []
    bounds = [0] + cuts + [n]
    return CoalitionStructure.of(n, (order[lo:hi] for lo, hi in zip(bounds, bounds[1:])))


def random_laminar_structure(rng: random.Random, n: int, keep: float = 0.6) -> CoalitionStructure:
    """Zufaellige Hierarchie: Bloecke werden rekursiv in 2-3 Teile zerlegt, jeder Block mit Wahrscheinlichkeit `keep` uebernommen"""
    agents = list(range(1, n + 1))
    rng.shuffle(agents)
    coalitions: List[List[int]] = []

    def split(block: List[int]) -> None:
        if rng.random() < keep:
            coalitions.append(block)
        if len(block) < 2:
            return
        parts = rng.randint(2, min(3, len(block)))
        cuts = sorted(rng.sample(range(1, len(block)), parts - 1))
        bounds = [0] + cuts + [len(block)]
        for lo, hi in zip(bounds, bounds[1:]):
            split(block[lo:hi])

    split(agents)
    return CoalitionStructure.of(n, coalitions)


def random_contiguous_structure(rng: random.Random, n: int,
                                count: Optional[int] = None) -> Tuple[CoalitionStructure, PathWitness]:
    """Zufaellige Intervalle entlang eines zufaelligen Pfades"""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    count = rng.randint(0, 2 * n) if count is None else count
    coalitions = []
    for _ in range(count):
        lo = rng.randrange(n)
        hi = rng.randrange(lo, n)
        coalitions.append(order[lo:hi + 1])
    return CoalitionStructure.of(n, coalitions), PathWitness(tuple(order))


def random_nash_allocation(g: Rsg, d: RsgDerived, rng: random.Random,
                           low: Optional[FrozenSet[int]] = None) -> Allocation:
    """
    Gleichverteilte low-Menge (Typ-1-Ressourcen auf Quote - 1), danach
    gleichverteilte Platzierung der Agenten.
    """
    t1 = list(d.t1)
    if low is None:
        low = frozenset(rng.sample(t1, d.low_count))
    elif len(low) != d.low_count or not low <= set(t1):
        raise PreconditionError("low-Menge passt nicht zu den Quoten")
    slots: List[int] = []
    for i, q in enumerate(d.quota):
        slots.extend([i] * (q - 1 if i in low else q))
    rng.shuffle(slots)
    return Allocation(tuple(slots), g.n_resources)

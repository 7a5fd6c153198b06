"""
Spielmodell: Strategic-Form-Spiele und Resource Selection Games (RSG)

Agenten sind 1-basiert (1..n), Ressourcen intern 0-basiert (0..m-1).
Kosten sind exakte Zahlen (int oder Fraction), nie float.
"""
import bisect
import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

from config import ALPHA_ENUMERATION_LIMIT
from exceptions import InvalidInstanceError, NotNashError

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]
Profile = Tuple[int, ...]


def as_rational(value) -> Number:
    """Wandelt int, Fraction, str ("3/2", "1.5") oder float exakt in eine rationale Zahl"""
    if isinstance(value, bool):
        raise InvalidInstanceError(f"Ungueltiger Zahlwert: {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, float):
        value = str(value)
    if isinstance(value, str):
        try:
            result = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInstanceError(f"Ungueltiger Zahlwert: {value!r}") from exc
        return result.numerator if result.denominator == 1 else result
    raise InvalidInstanceError(f"Ungueltiger Zahlwert: {value!r}")


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Alle Tupel von `parts` nichtnegativen Zahlen mit Summe `total` (lexikographisch absteigend)"""
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in compositions(total - head, parts - 1):
            yield (head,) + tail


# === STRATEGIC FORM ===

@dataclass(frozen=True)
class StrategicGame:
    """Endliches Spiel in Normalform; Strategien je Agent 0-basiert, Payoffs je Agent (hoeher ist besser)"""
    n_agents: int
    strategy_counts: Tuple[int, ...]
    payoffs: Mapping[Profile, Tuple[Number, ...]] = field(compare=False)

    def __post_init__(self):
        if self.n_agents < 1:
            raise InvalidInstanceError("Ein Spiel braucht mindestens einen Agenten")
        if len(self.strategy_counts) != self.n_agents or any(k < 1 for k in self.strategy_counts):
            raise InvalidInstanceError("Jeder Agent braucht mindestens eine Strategie")
        expected = 1
        for k in self.strategy_counts:
            expected *= k
        if len(self.payoffs) != expected:
            raise InvalidInstanceError(
                f"Payoff-Tabelle unvollstaendig: {len(self.payoffs)} von {expected} Profilen"
            )
        for profile, values in self.payoffs.items():
            if len(profile) != self.n_agents or len(values) != self.n_agents:
                raise InvalidInstanceError(f"Profil {profile} hat falsche Laenge")
            if any(not 0 <= s < k for s, k in zip(profile, self.strategy_counts)):
                raise InvalidInstanceError(f"Profil {profile} ausserhalb der Strategiemengen")

    def payoff(self, profile: Profile) -> Tuple[Number, ...]:
        return self.payoffs[tuple(profile)]

    def profiles(self) -> Iterator[Profile]:
        return itertools.product(*(range(k) for k in self.strategy_counts))


# === RESOURCE SELECTION GAME ===

class ResourceType(str, Enum):
    TYPE1 = "type1"     # f_i(q_i) == alpha
    TYPE2 = "type2"     # f_i(q_i) < alpha


def _validated_table(table: Sequence, n_agents: int, index: int) -> Tuple[Number, ...]:
    values = tuple(as_rational(v) for v in table)
    if len(values) != n_agents:
        raise InvalidInstanceError(
            f"Ressource {index + 1}: Kostentabelle hat {len(values)} statt {n_agents} Eintraege"
        )
    if values and values[0] <= 0:
        raise InvalidInstanceError(f"Ressource {index + 1}: Kosten muessen positiv sein")
    for q in range(1, len(values)):
        if values[q] <= values[q - 1]:
            raise InvalidInstanceError(
                f"Ressource {index + 1}: Kosten nicht streng steigend bei Last {q + 1}"
            )
    return values


@dataclass(frozen=True)
class Rsg:
    """
    Resource Selection Game: n Agenten waehlen je eine Ressource,
    cost_tables[i][q-1] = f_i(q). f_i(0) = 0 wird nie gelesen.

    Identische Tabellen (gleiches Objekt) werden nur einmal geprueft und
    bleiben geteilt, damit Instanzen mit tausenden Ressourcen klein bleiben.
    """
    n_agents: int
    cost_tables: Tuple[Tuple[Number, ...], ...]
    names: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.n_agents < 1:
            raise InvalidInstanceError("Ein RSG braucht mindestens einen Agenten")
        if not self.cost_tables:
            raise InvalidInstanceError("Ein RSG braucht mindestens eine Ressource")
        checked: Dict[int, Tuple[Number, ...]] = {}
        tables = []
        for index, table in enumerate(self.cost_tables):
            key = id(table)
            if key not in checked:
                checked[key] = _validated_table(table, self.n_agents, index)
            tables.append(checked[key])
        object.__setattr__(self, "cost_tables", tuple(tables))
        names = tuple(self.names) or tuple(f"r{i + 1}" for i in range(len(tables)))
        if len(names) != len(tables):
            raise InvalidInstanceError("Anzahl der Ressourcennamen passt nicht zu den Tabellen")
        object.__setattr__(self, "names", names)

    @property
    def n_resources(self) -> int:
        return len(self.cost_tables)

    def cost(self, resource: int, load: int) -> Number:
        """f_i(load); Last 0 kostet nichts"""
        if load <= 0:
            return 0
        return self.cost_tables[resource][load - 1]

    def capacity(self, resource: int, value: Number) -> int:
        """Groesste Last q mit f_i(q) <= value"""
        return bisect.bisect_right(self.cost_tables[resource], value)

    def distinct_tables(self) -> Dict[int, Tuple[Tuple[Number, ...], int]]:
        """Tabellen-ID -> (Tabelle, Anzahl Ressourcen mit dieser Tabelle)"""
        groups: Dict[int, Tuple[Tuple[Number, ...], int]] = {}
        for table in self.cost_tables:
            current = groups.get(id(table))
            groups[id(table)] = (table, 1 if current is None else current[1] + 1)
        return groups

    def is_identical(self) -> bool:
        first = self.cost_tables[0]
        return all(table is first or table == first for table in self.cost_tables)


@dataclass(frozen=True)
class RsgDerived:
    alpha: Number
    quota: Tuple[int, ...]
    resource_type: Tuple[ResourceType, ...]
    beta: Mapping[int, Number] = field(compare=False)
    n_agents: int = 0

    @cached_property
    def t1(self) -> Tuple[int, ...]:
        return tuple(i for i, t in enumerate(self.resource_type) if t is ResourceType.TYPE1)

    @cached_property
    def t2(self) -> Tuple[int, ...]:
        return tuple(i for i, t in enumerate(self.resource_type) if t is ResourceType.TYPE2)

    @property
    def low_count(self) -> int:
        """Anzahl der low-Ressourcen jeder Nash-Allokation: Summe der Quoten minus n"""
        return sum(self.quota) - self.n_agents


# === ALLOKATIONEN ===

@dataclass(frozen=True)
class Allocation:
    """assignment[j-1] = Ressource von Agent j"""
    assignment: Tuple[int, ...]
    n_resources: int

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(self.assignment))
        if not self.assignment:
            raise InvalidInstanceError("Allokation ohne Agenten")
        if any(not 0 <= r < self.n_resources for r in self.assignment):
            raise InvalidInstanceError("Allokation verweist auf unbekannte Ressource")

    @classmethod
    def from_groups(cls, groups: Sequence[Iterable[int]], n_agents: Optional[int] = None) -> "Allocation":
        """Baut eine Allokation aus Agentenmengen je Ressource; prueft, dass jeder Agent genau einmal vorkommt"""
        groups = [sorted(g) for g in groups]
        total = sum(len(g) for g in groups)
        n = total if n_agents is None else n_agents
        assignment = [-1] * n
        for resource, members in enumerate(groups):
            for agent in members:
                if not 1 <= agent <= n:
                    raise InvalidInstanceError(f"Agent {agent} ausserhalb von 1..{n}")
                if assignment[agent - 1] != -1:
                    raise InvalidInstanceError(f"Agent {agent} mehrfach zugeordnet")
                assignment[agent - 1] = resource
        missing = [j + 1 for j, r in enumerate(assignment) if r == -1]
        if missing:
            raise InvalidInstanceError(f"Agenten ohne Ressource: {missing}")
        return cls(tuple(assignment), len(groups))

    @property
    def n_agents(self) -> int:
        return len(self.assignment)

    @cached_property
    def groups(self) -> Tuple[FrozenSet[int], ...]:
        members = [[] for _ in range(self.n_resources)]
        for agent, resource in enumerate(self.assignment, start=1):
            members[resource].append(agent)
        return tuple(frozenset(m) for m in members)

    @cached_property
    def loads(self) -> Tuple[int, ...]:
        counts = [0] * self.n_resources
        for resource in self.assignment:
            counts[resource] += 1
        return tuple(counts)

    def resource_of(self, agent: int) -> int:
        return self.assignment[agent - 1]

    def moved(self, moves: Mapping[int, int]) -> "Allocation":
        """Neue Allokation, in der die Agenten aus `moves` auf ihre Zielressource wechseln"""
        assignment = list(self.assignment)
        for agent, target in moves.items():
            assignment[agent - 1] = target
        return Allocation(tuple(assignment), self.n_resources)

    def __str__(self) -> str:
        parts = ("{" + ",".join(str(j) for j in sorted(g)) + "}" for g in self.groups)
        return "(" + ",".join(parts) + ")"


def all_allocations(g: Rsg) -> Iterator[Allocation]:
    """Alle m^n Allokationen in lexikographischer Reihenfolge der Zuordnung"""
    for assignment in itertools.product(range(g.n_resources), repeat=g.n_agents):
        yield Allocation(assignment, g.n_resources)


def allocation_costs(g: Rsg, a: Allocation) -> Tuple[Number, ...]:
    """Kosten je Agent: Agent j auf Ressource i zahlt f_i(|a_i|)"""
    if a.n_agents != g.n_agents or a.n_resources != g.n_resources:
        raise InvalidInstanceError("Allokation passt nicht zum Spiel")
    per_resource = [g.cost(i, load) for i, load in enumerate(a.loads)]
    return tuple(per_resource[r] for r in a.assignment)


def maxcost(g: Rsg, a: Allocation) -> Number:
    return max(g.cost(i, load) for i, load in enumerate(a.loads) if load > 0)


# === ABGELEITETE GROESSEN ===

def _alpha_by_enumeration(g: Rsg) -> Number:
    best = None
    for loads in compositions(g.n_agents, g.n_resources):
        value = max(g.cost(i, load) for i, load in enumerate(loads) if load > 0)
        if best is None or value < best:
            best = value
    return best


def _alpha_by_bisection(g: Rsg) -> Number:
    groups = list(g.distinct_tables().values())
    candidates = sorted({v for table, _ in groups for v in table})

    def feasible(value: Number) -> bool:
        return sum(bisect.bisect_right(table, value) * count for table, count in groups) >= g.n_agents

    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return candidates[lo]


def compute_alpha(g: Rsg) -> Number:
    """alpha = kleinste maxcost ueber alle Allokationen (exakt)"""
    n, m = g.n_agents, g.n_resources
    if m == 1:
        return g.cost(0, n)
    if m == 2 or (n <= 12 and comb(n + m - 1, m - 1) <= ALPHA_ENUMERATION_LIMIT):
        logger.debug("alpha per Lastvektor-Aufzaehlung (n=%d, m=%d)", n, m)
        return _alpha_by_enumeration(g)
    logger.debug("alpha per Binaersuche ueber Tabellenwerte (n=%d, m=%d)", n, m)
    return _alpha_by_bisection(g)


def derive_rsg(g: Rsg) -> RsgDerived:
    """Berechnet alpha, Quoten, Typen und beta-Werte"""
    alpha = compute_alpha(g)
    capacity_cache: Dict[int, int] = {}
    quota = []
    types = []
    beta: Dict[int, Number] = {}
    for i, table in enumerate(g.cost_tables):
        key = id(table)
        if key not in capacity_cache:
            capacity_cache[key] = bisect.bisect_right(table, alpha)
        q = capacity_cache[key]
        quota.append(q)
        if q >= 1 and table[q - 1] == alpha:
            types.append(ResourceType.TYPE1)
            beta[i] = g.cost(i, q - 1)
        else:
            types.append(ResourceType.TYPE2)
    derived = RsgDerived(alpha, tuple(quota), tuple(types), beta, g.n_agents)
    if not derived.t1:
        raise InvalidInstanceError("Keine Ressource vom Typ 1 gefunden; alpha inkonsistent")
    return derived


# === NASH ===

def is_nash_by_characterization(g: Rsg, d: RsgDerived, a: Allocation) -> bool:
    """
    Nash-Charakterisierung ueber Quoten:
    Typ-2-Ressourcen genau auf Quote, Typ-1-Ressourcen auf Quote oder Quote-1,
    mindestens eine Typ-1-Ressource auf Quote.
    """
    loads = a.loads
    some_t1_full = False
    for i, load in enumerate(loads):
        q = d.quota[i]
        if d.resource_type[i] is ResourceType.TYPE2:
            if load != q:
                return False
        elif load == q:
            some_t1_full = True
        elif load != q - 1:
            return False
    return some_t1_full


def is_nash_by_deviation(g: Rsg, a: Allocation) -> bool:
    """Direkte Pruefung: kein einzelner Agent verbessert sich durch einen Wechsel"""
    loads = a.loads
    for i, load in enumerate(loads):
        if load == 0:
            continue
        current = g.cost(i, load)
        for target in range(g.n_resources):
            if target != i and g.cost(target, loads[target] + 1) < current:
                return False
    return True


def classify_low_high(g: Rsg, d: RsgDerived, a: Allocation) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    """low = Typ-1-Ressourcen mit Last q_i - 1, high = alle uebrigen"""
    if not is_nash_by_characterization(g, d, a):
        raise NotNashError(f"Allokation {a} ist kein Nash-Gleichgewicht")
    low = frozenset(
        i for i in d.t1 if a.loads[i] == d.quota[i] - 1
    )
    high = frozenset(range(g.n_resources)) - low
    return low, high


def rsg_to_strategic_game(g: Rsg) -> StrategicGame:
    """Normalform des RSG (Payoff = -Kosten); nur fuer kleine Instanzen"""
    payoffs = {}
    for profile in itertools.product(range(g.n_resources), repeat=g.n_agents):
        costs = allocation_costs(g, Allocation(profile, g.n_resources))
        payoffs[profile] = tuple(-c for c in costs)
    return StrategicGame(g.n_agents, (g.n_resources,) * g.n_agents, payoffs)

"""
Reproduktion der Existenztabelle: Strukturklasse x Ressourcenart

"+"-Zellen werden durch Konstruktion auf Zufallsinstanzen belegt,
"-"-Zellen durch Zertifikate bzw. die Widerlegung der grossen Instanz.
"""
import logging
import random
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from exceptions import RsgError
from game_model import classify_low_high, derive_rsg, is_nash_by_characterization
from coalition_structures import laminar_to_path
from generators import (
    random_contiguous_structure,
    random_laminar_structure,
    random_nash_allocation,
    random_partition_structure,
    random_rsg,
    random_two_resource_rsg,
)
from stability import is_C_stable
from construction import (
    algorithm1_round_robin,
    construct_nash,
    find_equilibrium_by_search,
    is_round_robin_balanced,
    trace_two_resource_laminar_eq,
)
from counterexamples import (
    Fixture,
    check_example2_constraints,
    fixture_example2,
    get_fixture,
    refute_example2,
    replay_certificate,
    verify_no_equilibrium,
)

logger = logging.getLogger(__name__)

ROWS = ("partition", "laminar", "contiguous", "centralized")
COLUMNS = ("general", "two", "identical", "two-identical")
EXPECTED = {
    "partition": "++++",
    "laminar": "-+++",
    "contiguous": "--++",
    "centralized": "----",
}


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: int
    total: int
    failures: Tuple[str, ...] = ()
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.total > 0 and self.passed == self.total


def _run_suite(name: str, samples: int, check: Callable[[int], Optional[str]]) -> SuiteResult:
    started = time.perf_counter()
    failures: List[str] = []
    for index in range(samples):
        try:
            problem = check(index)
        except RsgError as exc:
            problem = f"{type(exc).__name__}: {exc}"
        if problem:
            failures.append(f"#{index}: {problem}")
    return SuiteResult(name, samples - len(failures), samples, tuple(failures[:10]),
                       time.perf_counter() - started)


# === SUITES ===

def round_robin_suite(seed: int, samples: int, structure: str = "contiguous",
                      max_agents: int = 10, max_resources: int = 4,
                      two_resources: bool = False) -> SuiteResult:
    """Round-Robin auf identischen Ressourcen: Nash, C-stabil, Balance-Bedingung"""
    rng = random.Random(seed)

    def check(_: int) -> Optional[str]:
        n = rng.randint(1, max_agents)
        m = 2 if two_resources else rng.randint(1, max_resources)
        g = random_rsg(rng, n, m, identical=True)
        if structure == "contiguous":
            C, path = random_contiguous_structure(rng, n)
        else:
            C = random_partition_structure(rng, n) if structure == "partition" else random_laminar_structure(rng, n)
            path = laminar_to_path(C)
        a = algorithm1_round_robin(g, path)
        d = derive_rsg(g)
        if not is_nash_by_characterization(g, d, a):
            return f"{a} ist kein Nash-Gleichgewicht"
        low, high = classify_low_high(g, d, a)
        if not is_round_robin_balanced(a, low, high, C):
            return f"{a} verletzt die Balance"
        report = is_C_stable(g, a, C)
        return None if report.stable else f"{a}: {report}"

    return _run_suite(f"round-robin/{structure}", samples, check)


def two_resource_suite(seed: int, samples: int, structure: str = "laminar",
                       max_agents: int = 9, identical: bool = False) -> SuiteResult:
    """Zwei Ressourcen: Konstruktion terminiert, jeder Schritt dominiert, Ergebnis C-stabil"""
    rng = random.Random(seed)

    def check(_: int) -> Optional[str]:
        n = rng.randint(1, max_agents)
        g = random_two_resource_rsg(rng, n, identical=identical)
        C = random_partition_structure(rng, n) if structure == "partition" else random_laminar_structure(rng, n)
        trace_two_resource_laminar_eq(g, C)
        return None

    return _run_suite(f"two-resource/{structure}", samples, check)


def partition_search_suite(seed: int, samples: int, max_agents: int = 5,
                           max_resources: int = 3) -> SuiteResult:
    """Allgemeine Ressourcen, Partitionen: die Suche findet immer ein Gleichgewicht"""
    rng = random.Random(seed)

    def check(_: int) -> Optional[str]:
        n = rng.randint(1, max_agents)
        g = random_rsg(rng, n, rng.randint(1, max_resources))
        C = random_partition_structure(rng, n)
        a = find_equilibrium_by_search(g, C)
        return None if a is not None else "keine stabile Allokation gefunden"

    return _run_suite("search/partition", samples, check)


def example2_nash_sample(fixture: Fixture, d, rng: random.Random, mode: int):
    """
    Nash-Allokationen der grossen Instanz: 0 = gleichverteilt, 1 = x high,
    2 = x low mit hoechstens 7 hohen y.
    """
    x = fixture.resource_groups["x"][0]
    ys = list(fixture.resource_groups["y"])
    zs = list(fixture.resource_groups["z"])
    if mode == 1:
        low = frozenset(rng.sample(ys + zs, d.low_count))
    elif mode == 2:
        high_y = rng.randint(0, 7)
        low = frozenset([x]) | frozenset(rng.sample(ys, len(ys) - high_y)) | frozenset(rng.sample(zs, high_y))
    else:
        low = None
    return random_nash_allocation(fixture.game, d, rng, low)


def example2_suite(seed: int, samples: int, fixture: Optional[Fixture] = None) -> SuiteResult:
    """Widerlegung fuer die konstruierte und fuer zufaellige Nash-Allokationen"""
    fixture = fixture or fixture_example2()
    d = derive_rsg(fixture.game)
    problems = check_example2_constraints(fixture, d)
    rng = random.Random(seed)

    def check(index: int) -> Optional[str]:
        if problems:
            return "; ".join(problems)
        if index == 0:
            a = construct_nash(fixture.game, d)
        else:
            a = example2_nash_sample(fixture, d, rng, index % 3)
        refute_example2(fixture, a, d)
        return None

    return _run_suite("refute/example2", samples + 1, check)


def certificate_suite(name: str) -> SuiteResult:
    fixture = get_fixture(name)
    started = time.perf_counter()
    try:
        certificate = verify_no_equilibrium(fixture)
    except RsgError as exc:
        return SuiteResult(f"certificate/{name}", 0, 1, (str(exc),))
    ok = certificate.holds and replay_certificate(fixture.game, fixture.structure, certificate)
    failures = () if ok else (f"{len(certificate.lines)}/{certificate.total} widerlegt",)
    return SuiteResult(f"certificate/{name}", len(certificate.lines) if ok else 0,
                       certificate.total, failures, time.perf_counter() - started)


# === TABELLE ===

@dataclass(frozen=True)
class ExistenceCell:
    row: str
    column: str
    expected: str
    evidence: SuiteResult

    @property
    def passed(self) -> bool:
        return self.evidence.ok


@dataclass(frozen=True)
class ExistenceReport:
    seed: int
    samples: int
    cells: Tuple[ExistenceCell, ...]
    extras: Tuple[SuiteResult, ...] = ()
    seconds: float = 0.0

    @property
    def passed(self) -> int:
        return sum(cell.passed for cell in self.cells)

    @property
    def ok(self) -> bool:
        return self.passed == len(self.cells) and all(extra.ok for extra in self.extras)

    def matrix(self) -> Dict[str, Dict[str, str]]:
        result: Dict[str, Dict[str, str]] = {row: {} for row in ROWS}
        for cell in self.cells:
            result[cell.row][cell.column] = cell.expected + ("" if cell.passed else "!")
        return result


def cell_evidence(row: str, column: str, seed: int, samples: int,
                  cache: Optional[Dict[str, SuiteResult]] = None) -> SuiteResult:
    """Belegt eine Tabellenzelle; Zertifikate werden ueber `cache` geteilt"""
    cache = {} if cache is None else cache

    def cached(key: str, build: Callable[[], SuiteResult]) -> SuiteResult:
        if key not in cache:
            cache[key] = build()
        return cache[key]

    if row == "centralized":
        return cached("centralized", lambda: certificate_suite("centralized"))
    if row == "contiguous" and column in ("general", "two"):
        return cached("contiguous", lambda: certificate_suite("contiguous"))
    if row == "laminar" and column == "general":
        return cached("example2", lambda: example2_suite(seed, samples))
    if column == "general":
        return partition_search_suite(seed, samples)
    if column == "two":
        return two_resource_suite(seed, samples, structure=row)
    if row == "laminar" and column == "two-identical":
        return two_resource_suite(seed, samples, structure="laminar", identical=True)
    return round_robin_suite(seed, samples, structure=row, two_resources=column == "two-identical")


def reproduce_existence_matrix(seed: int, samples: int,
                     only: Optional[Tuple[str, str]] = None) -> ExistenceReport:
    """Alle 16 Zellen (oder nur `only` = (Zeile, Spalte)) mit Belegen"""
    started = time.perf_counter()
    cache: Dict[str, SuiteResult] = {}
    cells = []
    for row in ROWS:
        for k, column in enumerate(COLUMNS):
            if only is not None and (row, column) != only:
                continue
            evidence = cell_evidence(row, column, seed, samples, cache)
            cells.append(ExistenceCell(row, column, EXPECTED[row][k], evidence))
            logger.info("%s x %s: %s (%d/%d)", row, column,
                        "ok" if evidence.ok else "FEHLER", evidence.passed, evidence.total)
    extras = () if only is not None else (certificate_suite("example1"),)
    return ExistenceReport(seed, samples, tuple(cells), extras, time.perf_counter() - started)

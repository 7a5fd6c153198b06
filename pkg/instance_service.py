"""
Instanzdateien lesen/schreiben und zwischen Schemas und Domaenenobjekten umrechnen.
Wird von CLI und HTTP-API gemeinsam genutzt.
"""
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from pydantic import ValidationError

from exceptions import ConstructionError, InvalidInstanceError
from game_model import Allocation, Rsg, derive_rsg
from coalition_structures import (
    Circle,
    CoalitionStructure,
    Notion,
    PathWitness,
    PlanarWitness,
    find_contiguous_path,
    format_coalition,
    is_contiguous_order,
    is_laminar,
    is_partition,
    laminar_to_path,
    structure_for_notion,
    verify_embedding,
)
from stability import Deviation, StabilityReport, is_C_stable
from construction import (
    algorithm1_round_robin,
    construct_nash,
    find_equilibrium_by_search,
    trace_two_resource_laminar_eq,
)
from counterexamples import Certificate, Fixture, certify_no_equilibrium
from reproduction import ExistenceReport
from schemas import (
    AllocationRecord,
    CellOut,
    CertificateLineOut,
    CertificateOut,
    CircleSpec,
    ClassifyReport,
    DeviationRecord,
    EmbeddingSpec,
    InstanceFile,
    MoveRecord,
    ResourceSpec,
    SolveResponse,
    StabilityReportOut,
    ExistenceReportOut,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Instance:
    game: Rsg
    structure: CoalitionStructure
    path: Optional[PathWitness] = None
    embedding: Optional[PlanarWitness] = None
    name: Optional[str] = None


# === EINLESEN ===

def _validation_message(exc: ValidationError) -> str:
    lines = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"]) or "instance"
        lines.append(f"{location}: {error['msg']}")
    return "\n".join(lines)


def _resources(spec: InstanceFile) -> Tuple[Tuple[tuple, ...], Tuple[str, ...]]:
    tables: List[tuple] = []
    names: List[str] = []
    for resource in spec.resources:
        table = tuple(resource.costs)
        if resource.count == 1:
            tables.append(table)
            names.append(resource.name or f"r{len(names) + 1}")
            continue
        base = resource.name or "r"
        for k in range(1, resource.count + 1):
            tables.append(table)        # gleiches Objekt, Rsg prueft es nur einmal
            names.append(f"{base}{k}")
    return tuple(tables), tuple(names)


def instance_from_spec(spec: InstanceFile) -> Instance:
    tables, names = _resources(spec)
    game = Rsg(spec.agents, tables, names)
    structure = CoalitionStructure.of(spec.agents, spec.coalitions)
    path = PathWitness(tuple(spec.path)) if spec.path is not None else None
    embedding = None
    if spec.embedding is not None:
        positions = {agent: tuple(point) for agent, point in spec.embedding.positions.items()}
        circles = {
            frozenset(spec.coalitions[circle.coalition]): Circle(circle.center, circle.squared)
            for circle in spec.embedding.circles
        }
        embedding = PlanarWitness(positions, circles)
    return Instance(game, structure, path, embedding, spec.name)


def parse_instance(text: Union[str, bytes]) -> Instance:
    """JSON-Text -> Instance; Fehler als InvalidInstanceError mit Feldpfaden"""
    try:
        spec = InstanceFile.model_validate_json(text)
    except ValidationError as exc:
        raise InvalidInstanceError(_validation_message(exc)) from None
    return instance_from_spec(spec)


def load_instance(path: Union[str, Path]) -> Instance:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidInstanceError(f"{path}: {exc.strerror}") from None
    try:
        return parse_instance(text)
    except InvalidInstanceError as exc:
        raise InvalidInstanceError(f"{path}:\n{exc}") from None


# === SCHREIBEN ===

def _resource_specs(g: Rsg) -> List[ResourceSpec]:
    """Aufeinanderfolgende gleiche Tabellen mit Namen base1..baseK werden zu count zusammengefasst"""
    specs = []
    i = 0
    while i < g.n_resources:
        table, name = g.cost_tables[i], g.names[i]
        run = 1
        if name.endswith("1") and len(name) > 1:
            base = name[:-1]
            while (
                i + run < g.n_resources
                and g.names[i + run] == f"{base}{run + 1}"
                and (g.cost_tables[i + run] is table or g.cost_tables[i + run] == table)
            ):
                run += 1
        if run > 1:
            specs.append(ResourceSpec(name=base, costs=list(table), count=run))
        else:
            specs.append(ResourceSpec(name=name, costs=list(table)))
        i += run
    return specs


def instance_to_spec(instance: Instance) -> InstanceFile:
    coalitions = [sorted(c) for c in instance.structure]
    embedding = None
    if instance.embedding is not None:
        index = {frozenset(c): k for k, c in enumerate(coalitions)}
        circles = []
        for c, circle in instance.embedding.circles.items():
            if c not in index:
                raise InvalidInstanceError(f"Kreis fuer {format_coalition(c)} ohne Koalition")
            circles.append(CircleSpec(coalition=index[c], center=circle.center,
                                      radius_squared=circle.radius_squared))
        circles.sort(key=lambda spec: spec.coalition)
        embedding = EmbeddingSpec(
            positions={agent: point for agent, point in sorted(instance.embedding.positions.items())},
            circles=circles,
        )
    return InstanceFile(
        name=instance.name,
        agents=instance.game.n_agents,
        resources=_resource_specs(instance.game),
        coalitions=coalitions,
        path=list(instance.path.order) if instance.path is not None else None,
        embedding=embedding,
    )


def dump_instance(instance: Instance, indent: Optional[int] = 2) -> str:
    data = instance_to_spec(instance).model_dump(mode="json", exclude_none=True)
    return json.dumps(data, indent=indent)


def fixture_to_instance(fixture: Fixture) -> Instance:
    return Instance(fixture.game, fixture.structure, fixture.path, fixture.embedding, fixture.name)


# === ALLOKATIONEN ===

def allocation_from_groups(groups: Sequence[Sequence[int]], g: Rsg) -> Allocation:
    if len(groups) != g.n_resources:
        raise InvalidInstanceError(f"Allokation hat {len(groups)} statt {g.n_resources} Ressourcen")
    return Allocation.from_groups(groups, g.n_agents)


def parse_allocation(text: str, g: Rsg) -> Allocation:
    """Format "1,2|3": Agenten 1,2 auf Ressource 1, Agent 3 auf Ressource 2"""
    groups = []
    for part in text.split("|"):
        part = part.strip()
        try:
            groups.append([int(x) for x in part.split(",")] if part else [])
        except ValueError:
            raise InvalidInstanceError(f"Ungueltige Allokation: {text!r}") from None
    return allocation_from_groups(groups, g)


# === BERICHTE ===

def allocation_record(a: Allocation) -> AllocationRecord:
    return AllocationRecord(groups=[sorted(members) for members in a.groups], text=str(a))


def deviation_record(dev: Deviation) -> DeviationRecord:
    return DeviationRecord(
        coalition=sorted(dev.coalition),
        moves=[MoveRecord(agent=j, origin=o + 1, target=t + 1) for j, o, t in dev.moves],
        text=dev.describe(),
    )


def report_record(report: StabilityReport) -> StabilityReportOut:
    if report.stable:
        return StabilityReportOut(stable=True, text=str(report))
    return StabilityReportOut(
        stable=False,
        coalition=list(report.members),
        deviation=deviation_record(report.deviation),
        before=list(report.before),
        after=list(report.after),
        text=str(report),
    )


def certificate_record(certificate: Certificate, limit: Optional[int] = None) -> CertificateOut:
    lines = certificate.lines if limit is None else certificate.lines[:limit]
    return CertificateOut(
        holds=certificate.holds,
        total=certificate.total,
        refuted=len(certificate.lines),
        stable_allocation=(
            allocation_record(certificate.stable_allocation)
            if certificate.stable_allocation is not None else None
        ),
        lines=[
            CertificateLineOut(
                allocation=allocation_record(line.allocation),
                coalition=list(line.report.members),
                deviation=deviation_record(line.report.deviation),
            )
            for line in lines
        ],
    )


# === KLASSIFIKATION ===

def classify_instance(instance: Instance) -> ClassifyReport:
    C = instance.structure
    partition = is_partition(C)
    laminar = is_laminar(C)
    lines = [f"partition: {'yes' if partition else 'no'}", f"laminar: {'yes' if laminar else 'no'}"]

    path = None
    if instance.path is not None and is_contiguous_order(C, instance.path.order):
        path = instance.path
        lines.append(f"contiguous: yes (path {path}, verified)")
    else:
        path = laminar_to_path(C) if laminar else find_contiguous_path(C)
        if path is not None:
            lines.append(f"contiguous: yes (path {path})")
        elif instance.path is not None:
            lines.append("contiguous: no (supplied path rejected)")
        else:
            lines.append("contiguous: no")

    embedding_verified = None
    if instance.embedding is not None:
        embedding_verified = verify_embedding(C, instance.embedding)
    if embedding_verified:
        centralized = True
        lines.append("centralized: yes (embedding verified)")
    elif path is not None:
        centralized = True
        lines.append("centralized: yes (embedding from path)")
    else:
        centralized = None
        note = "supplied embedding rejected" if embedding_verified is False else "no embedding"
        lines.append(f"centralized: unknown ({note})")

    return ClassifyReport(
        partition=partition,
        laminar=laminar,
        contiguous=path is not None,
        centralized=centralized,
        path=list(path.order) if path is not None else None,
        embedding_verified=embedding_verified,
        lines=lines,
    )


# === LOESEN ===

@dataclass(frozen=True)
class SolveOutcome:
    notion: Notion
    method: str
    allocation: Optional[Allocation] = None
    report: Optional[StabilityReport] = None
    certificate: Optional[Certificate] = None
    steps: int = 0

    @property
    def found(self) -> bool:
        return self.allocation is not None


def _usable_path(instance: Instance, C: CoalitionStructure) -> Optional[PathWitness]:
    if instance.path is not None and is_contiguous_order(C, instance.path.order):
        return instance.path
    if is_laminar(C):
        return laminar_to_path(C)
    return find_contiguous_path(C)


def solve_instance(instance: Instance, notion: Notion, budget: Optional[int] = None) -> SolveOutcome:
    """
    Waehlt den passenden Konstruktor: Nash-Charakterisierung, Round-Robin
    (identische Ressourcen, zusammenhaengend), Zwei-Ressourcen-Verfahren
    (laminar), sonst exhaustive Suche mit Zertifikat bei Nichtexistenz.
    """
    notion = Notion(notion)
    g = instance.game
    C = structure_for_notion(notion, instance.structure, instance.path, instance.embedding)
    steps = 0

    if notion is Notion.NASH:
        method, a = "nash", construct_nash(g, derive_rsg(g))
    elif g.is_identical() and (path := _usable_path(instance, C)) is not None:
        method, a = "round-robin", algorithm1_round_robin(g, path)
    elif g.n_resources == 2 and is_laminar(C):
        trace = trace_two_resource_laminar_eq(g, C, verify=False)
        method, a, steps = f"two-resource-laminar (case {trace.case})", trace.allocation, len(trace.steps)
    else:
        method = "search"
        a = find_equilibrium_by_search(g, C, budget)
        if a is None:
            certificate = certify_no_equilibrium(g, C, budget)
            logger.info("Keine C-stabile Allokation, Zertifikat mit %d Zeilen", len(certificate.lines))
            return SolveOutcome(notion, "none", certificate=certificate)

    report = is_C_stable(g, a, C)
    if not report.stable:
        raise ConstructionError(f"Konstruktion {method} liefert keine stabile Allokation: {report}")
    return SolveOutcome(notion, method, a, report, steps=steps)


def solve_record(outcome: SolveOutcome, limit: Optional[int] = None) -> SolveResponse:
    return SolveResponse(
        notion=outcome.notion,
        method=outcome.method,
        found=outcome.found,
        allocation=allocation_record(outcome.allocation) if outcome.found else None,
        stability=report_record(outcome.report) if outcome.report is not None else None,
        certificate=certificate_record(outcome.certificate, limit) if outcome.certificate is not None else None,
        steps=outcome.steps,
    )


def _cell_record(row: str, column: str, expected: str, evidence) -> CellOut:
    return CellOut(
        row=row,
        column=column,
        expected=expected,
        passed=evidence.ok,
        evidence=evidence.name,
        detail=f"{evidence.passed}/{evidence.total}" + (f": {evidence.failures[0]}" if evidence.failures else ""),
    )


def existence_record(report: ExistenceReport) -> ExistenceReportOut:
    return ExistenceReportOut(
        seed=report.seed,
        samples=report.samples,
        passed=report.passed,
        total=len(report.cells),
        ok=report.ok,
        seconds=report.seconds,
        cells=[_cell_record(c.row, c.column, c.expected, c.evidence) for c in report.cells],
        extras=[_cell_record("super-strong", "two-identical", "-", extra) for extra in report.extras],
        matrix=report.matrix(),
    )

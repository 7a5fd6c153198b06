from pydantic import BaseModel, Field, BeforeValidator, PlainSerializer, WithJsonSchema, model_validator
from datetime import datetime
from fractions import Fraction
from typing import Annotated, Any, Dict, List, Optional, Tuple

from coalition_structures import Notion
from exceptions import InvalidInstanceError
from game_model import Number, as_rational


# === RATIONALE ZAHLEN ===

def parse_rational(value: Any) -> Number:
    """int, Dezimal- oder "p/q"-String, oder [p, q]"""
    if isinstance(value, (list, tuple)):
        if len(value) != 2 or any(isinstance(x, bool) or not isinstance(x, int) for x in value):
            raise ValueError("Bruch muss als [Zaehler, Nenner] angegeben werden")
        if value[1] == 0:
            raise ValueError("Nenner darf nicht 0 sein")
        return as_rational(Fraction(value[0], value[1]))
    try:
        return as_rational(value)
    except InvalidInstanceError as exc:
        raise ValueError(str(exc)) from None


def dump_rational(value: Number) -> Any:
    """Ganzzahlig als int, sonst [p, q]"""
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return [value.numerator, value.denominator]


Rational = Annotated[
    Any,
    BeforeValidator(parse_rational),
    PlainSerializer(dump_rational),
    WithJsonSchema({
        "anyOf": [
            {"type": "integer"},
            {"type": "string", "pattern": r"^-?\d+(\.\d+)?(/\d+)?$"},
            {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
        ]
    }),
]


# === INSTANZDATEI ===

class ResourceSpec(BaseModel):
    name: Optional[str] = Field(None, max_length=100)
    costs: List[Rational] = Field(..., min_length=1)
    # count > 1: gleiche Tabelle fuer mehrere Ressourcen (Namen name1..nameK)
    count: int = Field(1, ge=1, le=100000)


class CircleSpec(BaseModel):
    coalition: int = Field(..., ge=0, description="Index in coalitions (0-basiert)")
    center: int = Field(..., ge=1)
    radius: Optional[Rational] = None
    radius_squared: Optional[Rational] = None

    @model_validator(mode="after")
    def exactly_one_radius(self):
        if (self.radius is None) == (self.radius_squared is None):
            raise ValueError("Genau eines von radius / radius_squared angeben")
        if self.radius is not None and self.radius <= 0:
            raise ValueError("Radius muss positiv sein")
        if self.radius_squared is not None and self.radius_squared <= 0:
            raise ValueError("radius_squared muss positiv sein")
        return self

    @property
    def squared(self) -> Number:
        if self.radius_squared is not None:
            return self.radius_squared
        return self.radius * self.radius


class EmbeddingSpec(BaseModel):
    positions: Dict[int, Tuple[Rational, Rational]]
    circles: List[CircleSpec] = []


class InstanceFile(BaseModel):
    name: Optional[str] = Field(None, max_length=100)
    agents: int = Field(..., ge=1, le=100000)
    resources: List[ResourceSpec] = Field(..., min_length=1)
    coalitions: List[List[int]] = []
    path: Optional[List[int]] = None
    embedding: Optional[EmbeddingSpec] = None

    @model_validator(mode="after")
    def check_consistency(self):
        n = self.agents
        for index, resource in enumerate(self.resources):
            if len(resource.costs) != n:
                raise ValueError(f"resources.{index}.costs: {len(resource.costs)} Eintraege statt {n}")
        for index, members in enumerate(self.coalitions):
            if not members:
                raise ValueError(f"coalitions.{index}: leere Koalition")
            outside = [j for j in members if not 1 <= j <= n]
            if outside:
                raise ValueError(f"coalitions.{index}: Agenten {outside} ausserhalb von 1..{n}")
        if self.path is not None and sorted(self.path) != list(range(1, n + 1)):
            raise ValueError(f"path: keine Permutation von 1..{n}")
        if self.embedding is not None:
            if set(self.embedding.positions) != set(range(1, n + 1)):
                raise ValueError(f"embedding.positions: genau die Agenten 1..{n} erwartet")
            seen = set()
            for index, circle in enumerate(self.embedding.circles):
                if circle.coalition >= len(self.coalitions):
                    raise ValueError(f"embedding.circles.{index}: Koalition {circle.coalition} existiert nicht")
                if circle.coalition in seen:
                    raise ValueError(f"embedding.circles.{index}: Koalition {circle.coalition} doppelt")
                if circle.center not in self.coalitions[circle.coalition]:
                    raise ValueError(f"embedding.circles.{index}: Mittelpunkt {circle.center} nicht in der Koalition")
                seen.add(circle.coalition)
        return self


# === BERICHTE ===

class AllocationRecord(BaseModel):
    groups: List[List[int]]     # Agenten je Ressource, Ressourcen in Indexreihenfolge
    text: str


class MoveRecord(BaseModel):
    agent: int
    origin: int                 # Ressourcen 1-basiert
    target: int


class DeviationRecord(BaseModel):
    coalition: List[int]
    moves: List[MoveRecord]
    text: str


class StabilityReportOut(BaseModel):
    stable: bool
    coalition: Optional[List[int]] = None
    deviation: Optional[DeviationRecord] = None
    before: List[Rational] = []
    after: List[Rational] = []
    text: str


class CertificateLineOut(BaseModel):
    allocation: AllocationRecord
    coalition: List[int]
    deviation: DeviationRecord


class CertificateOut(BaseModel):
    holds: bool
    total: int
    refuted: int
    stable_allocation: Optional[AllocationRecord] = None
    lines: List[CertificateLineOut] = []


class ClassifyReport(BaseModel):
    partition: bool
    laminar: bool
    contiguous: bool
    centralized: Optional[bool] = None      # None = ohne Zeugen nicht entscheidbar
    path: Optional[List[int]] = None
    embedding_verified: Optional[bool] = None
    lines: List[str]


class CheckRequest(BaseModel):
    instance: InstanceFile
    allocation: List[List[int]]
    notion: Optional[Notion] = None


class SolveRequest(BaseModel):
    instance: InstanceFile
    notion: Notion = Notion.CONTIGUOUS
    budget: Optional[int] = Field(None, ge=1, le=10000000)


class SolveResponse(BaseModel):
    notion: Notion
    method: str
    found: bool
    allocation: Optional[AllocationRecord] = None
    stability: Optional[StabilityReportOut] = None
    certificate: Optional[CertificateOut] = None
    steps: int = 0


class CellOut(BaseModel):
    row: str
    column: str
    expected: str
    passed: bool
    evidence: str
    detail: str


class ExistenceReportOut(BaseModel):
    seed: int
    samples: int
    passed: int
    total: int
    ok: bool
    seconds: float
    cells: List[CellOut]
    extras: List[CellOut] = []
    matrix: Dict[str, Dict[str, str]] = {}


# === REPRODUKTIONSLAEUFE ===

class RunCreate(BaseModel):
    seed: int = Field(2024, ge=0)
    samples: int = Field(20, ge=1, le=200)


class ReproductionRunOut(BaseModel):
    id: int
    created_at: datetime
    seed: int
    samples: int
    cells_passed: int
    cells_total: int
    runtime_seconds: float
    matrix: Dict[str, Dict[str, str]]

    class Config:
        from_attributes = True

import json

from sqlalchemy import Column, Integer, Float, DateTime, Text
from sqlalchemy.sql import func
from database import Base


class ReproductionRun(Base):
    """Ein gespeicherter Lauf der Existenztabelle"""
    __tablename__ = "reproduction_runs"

    id = Column(Integer, primary_key=True, index=True)
    created_at = Column(DateTime, server_default=func.now(), index=True)

    seed = Column(Integer, nullable=False)
    samples = Column(Integer, nullable=False)
    cells_passed = Column(Integer, nullable=False)
    cells_total = Column(Integer, nullable=False)
    runtime_seconds = Column(Float, nullable=False)

    # Zeile -> Spalte -> erwartetes Vorzeichen ("!" angehaengt bei Fehlschlag)
    matrix_json = Column(Text, nullable=False, default="{}")

    @property
    def matrix(self) -> dict:
        return json.loads(self.matrix_json or "{}")

    @property
    def ok(self) -> bool:
        return self.cells_passed == self.cells_total

    @classmethod
    def from_report(cls, report) -> "ReproductionRun":
        """Aus einem reproduction.ExistenceReport"""
        return cls(
            seed=report.seed,
            samples=report.samples,
            cells_passed=report.passed,
            cells_total=len(report.cells),
            runtime_seconds=report.seconds,
            matrix_json=json.dumps(report.matrix()),
        )

#!/usr/bin/env python3
"""
Reproduktionslauf fuer Heroku Scheduler.

Aufruf: python reproduce_job.py [--seed N] [--samples N]

Rechnet die Existenztabelle mit den konfigurierten Parametern nach und
speichert das Ergebnis in der Datenbank. Exit-Code 1, wenn eine Zelle
fehlschlaegt.
"""
import argparse
import sys
from datetime import datetime

from config import REPRODUCE_SAMPLES, REPRODUCE_SEED
from database import SessionLocal, engine, Base
import models
from reproduction import reproduce_existence_matrix


def run_reproduction(seed: int, samples: int) -> bool:
    """Fuehrt den Lauf aus und speichert ihn. Gibt True zurueck wenn alle Zellen passen."""
    now = datetime.now().strftime("%Y-%m-%d %H:%M")
    print(f"[*] [{now}] Reproduktion mit seed={seed}, samples={samples}...")

    report = reproduce_existence_matrix(seed, samples)

    Base.metadata.create_all(bind=engine, checkfirst=True)
    db = SessionLocal()
    try:
        run = models.ReproductionRun.from_report(report)
        db.add(run)
        db.commit()
        db.refresh(run)
        print(f"[OK] Lauf #{run.id} gespeichert")
    finally:
        db.close()

    for cell in report.cells:
        if not cell.passed:
            print(f"[FEHLER] {cell.row} x {cell.column}: {cell.evidence.name}"
                  f" {cell.evidence.passed}/{cell.evidence.total}")
    for extra in report.extras:
        if not extra.ok:
            print(f"[FEHLER] {extra.name} {extra.passed}/{extra.total}")

    print(f"  Zellen:   {report.passed}/{len(report.cells)}")
    print(f"  Laufzeit: {report.seconds:.1f}s")
    return report.ok


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Existenztabelle nachrechnen und speichern")
    parser.add_argument("--seed", type=int, default=REPRODUCE_SEED)
    parser.add_argument("--samples", type=int, default=REPRODUCE_SAMPLES)
    args = parser.parse_args()
    sys.exit(0 if run_reproduction(args.seed, args.samples) else 1)

"""
Runs Router - gespeicherte Laeufe der Existenztabelle
"""
from fastapi import APIRouter, Depends, HTTPException, Query, Request, status
from sqlalchemy.orm import Session

import models
import schemas
from database import get_db
from reproduction import reproduce_existence_matrix
from routers import limiter

router = APIRouter(prefix="/api/runs", tags=["Reproduktion"])


@router.get("", response_model=list[schemas.ReproductionRunOut])
@limiter.limit("30/minute")
def list_runs(request: Request, limit: int = Query(20, ge=1, le=200), db: Session = Depends(get_db)):
    """Letzte Laeufe, neueste zuerst"""
    return (
        db.query(models.ReproductionRun)
        .order_by(models.ReproductionRun.id.desc())
        .limit(limit)
        .all()
    )


@router.get("/{run_id}", response_model=schemas.ReproductionRunOut)
@limiter.limit("30/minute")
def get_run(request: Request, run_id: int, db: Session = Depends(get_db)):
    run = db.query(models.ReproductionRun).filter(models.ReproductionRun.id == run_id).first()
    if not run:
        raise HTTPException(status_code=404, detail="Lauf nicht gefunden")
    return run


@router.post("", response_model=schemas.ReproductionRunOut, status_code=status.HTTP_201_CREATED)
@limiter.limit("2/minute")
def create_run(request: Request, body: schemas.RunCreate, db: Session = Depends(get_db)):
    """Rechnet die Tabelle mit seed/samples nach und speichert das Ergebnis"""
    report = reproduce_existence_matrix(body.seed, body.samples)
    run = models.ReproductionRun.from_report(report)
    db.add(run)
    db.commit()
    db.refresh(run)
    return run

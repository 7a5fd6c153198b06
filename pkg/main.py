from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from slowapi import _rate_limit_exceeded_handler
from slowapi.errors import RateLimitExceeded

import models  # noqa: F401  (Tabellen registrieren)
import schemas
from config import ALLOWED_ORIGINS, DEBUG
from database import engine, Base
from exceptions import BudgetExceededError, InvalidInstanceError, PreconditionError, RsgError
from coalition_structures import structure_for_notion
from stability import is_C_stable
from counterexamples import FIXTURE_NAMES, get_fixture
from instance_service import (
    allocation_from_groups,
    classify_instance,
    fixture_to_instance,
    instance_from_spec,
    instance_to_spec,
    report_record,
    solve_instance,
    solve_record,
)
from routers import limiter
from routers import runs as runs_router

# Example 2 ist fuer HTTP zu gross (CLI: export-fixture example2)
HTTP_FIXTURES = tuple(name for name in FIXTURE_NAMES if name != "example2")

# Zertifikatszeilen pro Antwort
MAX_CERTIFICATE_LINES = 1000

# Datenbank-Tabellen erstellen
try:
    Base.metadata.create_all(bind=engine, checkfirst=True)
except Exception:
    pass  # Fehler nicht loggen (keine DB-Details exponieren)

# === FASTAPI APP ===
app = FastAPI(
    title="RSG Equilibria API",
    description="Koalitionsstabile Gleichgewichte in Resource Selection Games pruefen, konstruieren und widerlegen",
    version="1.0.0",
    docs_url="/docs" if DEBUG else None,  # Docs nur im Debug-Modus
    redoc_url="/redoc" if DEBUG else None
)

# Rate Limit Handler
app.state.limiter = limiter
app.add_exception_handler(RateLimitExceeded, _rate_limit_exceeded_handler)

# CORS - eingeschraenkt
app.add_middleware(
    CORSMiddleware,
    allow_origins=ALLOWED_ORIGINS if not DEBUG else ["*"],
    allow_credentials=False,
    allow_methods=["GET", "POST"],
    allow_headers=["Content-Type"],
)

app.include_router(runs_router.router)


# === SECURITY HEADERS MIDDLEWARE ===
@app.middleware("http")
async def add_security_headers(request: Request, call_next):
    response = await call_next(request)
    # nur JSON-Antworten, keine HTML-Seiten
    response.headers["X-Content-Type-Options"] = "nosniff"
    if not DEBUG:
        response.headers["Strict-Transport-Security"] = "max-age=31536000; includeSubDomains"
    return response


# === FEHLER ===
@app.exception_handler(RsgError)
async def rsg_error_handler(request: Request, exc: RsgError):
    if isinstance(exc, (InvalidInstanceError, PreconditionError)):
        status_code = 422
    elif isinstance(exc, BudgetExceededError):
        status_code = 413
    else:
        status_code = 500
    return JSONResponse(status_code=status_code, content={"detail": str(exc), "error": type(exc).__name__})


@app.get("/api", tags=["Root"])
@limiter.limit("60/minute")
async def api_info(request: Request):
    """API Status und Info"""
    return {
        "name": "RSG Equilibria API",
        "version": "1.0.0",
        "status": "running",
        "docs": "/docs" if DEBUG else None
    }


@app.get("/health", tags=["Root"])
async def health_check():
    """Health Check Endpunkt (kein Rate Limit)"""
    return {"status": "healthy"}


# === ANALYSE ===

@app.post("/api/classify", response_model=schemas.ClassifyReport, tags=["Analyse"])
@limiter.limit("30/minute")
def classify(request: Request, body: schemas.InstanceFile):
    """Strukturklassen der Koalitionen und gefundene/gepruefte Zeugen"""
    return classify_instance(instance_from_spec(body))


@app.post("/api/check", response_model=schemas.StabilityReportOut, tags=["Analyse"])
@limiter.limit("30/minute")
def check(request: Request, body: schemas.CheckRequest):
    """Stabilitaet einer Allokation; ohne notion gegen die Koalitionen der Instanz"""
    instance = instance_from_spec(body.instance)
    a = allocation_from_groups(body.allocation, instance.game)
    C = instance.structure
    if body.notion is not None:
        C = structure_for_notion(body.notion, C, instance.path, instance.embedding)
    return report_record(is_C_stable(instance.game, a, C))


@app.post("/api/solve", response_model=schemas.SolveResponse, tags=["Analyse"])
@limiter.limit("10/minute")
def solve(request: Request, body: schemas.SolveRequest):
    """Gleichgewicht konstruieren oder Nichtexistenz mit Zertifikat belegen"""
    outcome = solve_instance(instance_from_spec(body.instance), body.notion, body.budget)
    return solve_record(outcome, MAX_CERTIFICATE_LINES)


# === INSTANZEN ===

@app.get("/api/fixtures", tags=["Instanzen"])
@limiter.limit("60/minute")
async def list_fixtures(request: Request):
    """Mitgelieferte Nichtexistenz-Instanzen"""
    return [{"name": name, "claim": get_fixture(name).claim.value} for name in HTTP_FIXTURES]


@app.get("/api/fixtures/{name}", response_model=schemas.InstanceFile,
         response_model_exclude_none=True, tags=["Instanzen"])
@limiter.limit("30/minute")
async def get_fixture_instance(request: Request, name: str):
    """Instanzdatei einer mitgelieferten Instanz"""
    if name not in HTTP_FIXTURES:
        raise HTTPException(status_code=404, detail=f"Instanz {name} nicht gefunden")
    return instance_to_spec(fixture_to_instance(get_fixture(name)))


if __name__ == "__main__":
    import os
    import uvicorn
    port = int(os.getenv("PORT", "8000"))
    uvicorn.run(app, host="0.0.0.0", port=port)

import os
import tempfile
from pathlib import Path

# Vor dem Import von config/database: eigene Test-Datenbank
_db_dir = tempfile.mkdtemp(prefix="rsg-test-")
os.environ["DATABASE_URL"] = f"sqlite:///{_db_dir}/test.db"

import pytest
from hypothesis import settings

settings.register_profile("rsg", deadline=None, max_examples=50)
settings.load_profile("rsg")

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


@pytest.fixture
def instances_dir() -> Path:
    return INSTANCES


@pytest.fixture
def client():
    from fastapi.testclient import TestClient
    from main import app
    from routers import limiter

    limiter.reset()
    with TestClient(app) as test_client:
        yield test_client

"""Shared fixtures: standard bodies, measures and isolated settings."""
import pytest

from app.core.config import settings
from app.services.body_service import body_service
from app.services.measure_service import measure_service


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path):
    """Commands mutate the settings singleton; restore it after every test."""
    snapshot = settings.model_dump()
    settings.OUTPUT_DIR = str(tmp_path / "output")
    settings.LOGS_DIR = str(tmp_path / "logs")
    yield settings
    for key, value in snapshot.items():
        setattr(settings, key, value)


@pytest.fixture
def cube2():
    return body_service.make_cube(2)


@pytest.fixture
def diamond2():
    return body_service.make_cross_polytope(2)


@pytest.fixture
def sheared_square():
    """{|x2| <= 1, |x1 - x2| <= 1}: symmetric, not unconditional, area 4."""
    return body_service.make_hpolytope([[0.0, 1.0], [0.0, -1.0], [1.0, -1.0], [-1.0, 1.0]], symmetric=True)


@pytest.fixture
def gaussian2():
    return measure_service.make_gaussian([1.0, 1.0])

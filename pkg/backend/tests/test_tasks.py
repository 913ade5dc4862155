"""Tests for the Celery verification task, run eagerly."""
import pytest

from app.services.body_service import body_service
from app.services.storage_service import storage_service
from app.workers.tasks import celery_app, verify_item_task


def cube_payload(check="santalo", **extra):
    document = storage_service.body_to_document(body_service.make_cube(2), "cube2d")
    payload = {
        "check": check,
        "dim": 2,
        "seed": 11,
        "body_id": "cube2d",
        "body": document.model_dump(mode="json", exclude_none=True),
    }
    payload.update(extra)
    return payload


def test_task_serialization_is_json():
    assert celery_app.conf.task_serializer == "json"
    assert celery_app.conf.worker_prefetch_multiplier == 1


def test_task_returns_report_rows():
    rows = verify_item_task.apply(args=[cube_payload()]).get()
    assert len(rows) == 1
    assert rows[0]["inequality_id"] == "santalo"
    assert rows[0]["body_id"] == "cube2d"
    assert rows[0]["passed"] is True


def test_task_with_measure():
    payload = cube_payload("main", measure={"kind": "gaussian", "params": [1.0]}, tolerances={"quad_tol": 1e-5})
    rows = verify_item_task.apply(args=[payload]).get()
    assert rows[0]["inequality_id"] == "main"
    assert rows[0]["measure_id"] == "gaussian(1,1)"
    assert rows[0]["passed"] is True


def test_task_propagates_errors():
    payload = cube_payload("main", measure={"kind": "correlated_gaussian", "cov": [[1.0, 0.5], [0.5, 1.0]]})
    result = verify_item_task.apply(args=[payload])
    assert result.failed()
    with pytest.raises(Exception):
        result.get()

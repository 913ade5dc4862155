"""Celery tasks for verification items."""
import logging
from typing import Any, Dict, List

from celery import Celery

from app.core.config import settings
from app.services.verification_service import verification_service

logger = logging.getLogger(__name__)

celery_app = Celery(
    "santalo_bench",
    broker=settings.CELERY_BROKER_URL,
    backend=settings.CELERY_RESULT_BACKEND
)

celery_app.conf.update(
    task_serializer="json",
    accept_content=["json"],
    result_serializer="json",
    timezone="UTC",
    enable_utc=True,
    task_track_started=True,
    task_time_limit=3600,
    task_soft_time_limit=3300,
    worker_prefetch_multiplier=1,
    worker_max_tasks_per_child=50
)


@celery_app.task(bind=True, max_retries=3, autoretry_for=(OSError,))
def verify_item_task(self, payload: Dict[str, Any]) -> List[Dict[str, Any]]:
    """
    Run one experiment item and return its reports as JSON rows.

    Payloads carry their own seed, so a retried or re-routed item
    reproduces the same rows.
    """
    check = payload.get("check")
    body_id = payload.get("body_id")
    logger.info(f"Starting {check} for body {body_id}")
    try:
        rows = verification_service.run_item(payload)
    except Exception as e:
        logger.error(f"Error running {check} for body {body_id}: {e}", exc_info=True)
        raise
    logger.info(f"Completed {check} for body {body_id}: {len(rows)} report(s)")
    return rows

"""Celery worker entry point."""
import sys

from app.core.logging_config import setup_logging
from app.workers.tasks import celery_app

if __name__ == "__main__":
    setup_logging()
    celery_app.worker_main(argv=["worker", *sys.argv[1:]])

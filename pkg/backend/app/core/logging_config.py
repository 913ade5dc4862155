"""Logging configuration."""
import logging
import sys
from pathlib import Path
from typing import Optional

from app.core.config import settings


def setup_logging(level: Optional[str] = None) -> logging.Logger:
    """Configure application logging."""
    # Create logs directory if it does not exist
    Path(settings.LOGS_DIR).mkdir(parents=True, exist_ok=True)

    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            logging.FileHandler(f"{settings.LOGS_DIR}/santalo.log"),
            # stdout carries command output only
            logging.StreamHandler(sys.stderr)
        ],
        force=True
    )

    # Set specific loggers
    logging.getLogger("celery").setLevel(logging.INFO)
    logging.getLogger("matplotlib").setLevel(logging.WARNING)

    return logging.getLogger("app")

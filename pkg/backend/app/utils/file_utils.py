"""File and number-formatting utility functions."""
from pathlib import Path
from typing import Union
import logging

logger = logging.getLogger(__name__)


def ensure_directory(path: Union[str, Path]) -> Path:
    """Ensure directory exists, create if not."""
    dir_path = Path(path)
    dir_path.mkdir(parents=True, exist_ok=True)
    return dir_path


def format_float(value: float) -> str:
    """Float at 17 significant digits."""
    return format(float(value), ".17g")


def format_estimate(value: float, err: float) -> str:
    """Human-readable value ± err."""
    return f"{format_float(value)} ± {float(err):.3g}"

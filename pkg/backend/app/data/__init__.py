"""Example body files and experiment documents."""
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent
BODIES_DIR = DATA_DIR / "bodies"
EXPERIMENTS_DIR = DATA_DIR / "experiments"

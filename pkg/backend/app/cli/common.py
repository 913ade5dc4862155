"""Options and helpers shared by the command modules."""
import argparse
import logging
from pathlib import Path
from typing import Optional

from app.core.config import settings
from app.core.exceptions import ConfigError
from app.models.measure import LogConcaveMeasure
from app.schemas.estimate_schema import EstimateMethod
from app.schemas.experiment_schema import ExperimentConfig, MeasureKind, MeasureSpec
from app.services.measure_service import measure_service
from app.services.storage_service import storage_service

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED = 2


def common_parser() -> argparse.ArgumentParser:
    """Flags accepted by every command, before or after its name."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", help="experiment document (JSON)")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--quad-tol", type=float, help="relative quadrature tolerance")
    parser.add_argument("--mc-samples", type=int, help="Monte Carlo sample count")
    parser.add_argument("--jobs", type=int, help="parallel workers")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    return parser


def measure_options(parser: argparse.ArgumentParser) -> None:
    """Inline measure description for single-body commands."""
    parser.add_argument(
        "--measure",
        choices=[kind.value for kind in MeasureKind],
        help="integrate against this measure instead of Lebesgue volume"
    )
    parser.add_argument("--params", type=float, nargs="+", default=[], help="per-axis measure parameters")
    parser.add_argument("--measure-body", help="body file of a uniform_body measure")
    parser.add_argument(
        "--engine",
        choices=[EstimateMethod.QUADRATURE.value, EstimateMethod.MONTE_CARLO.value],
        default=EstimateMethod.QUADRATURE.value
    )


def apply_overrides(args: argparse.Namespace) -> None:
    """Flags win over environment settings for this run."""
    if args.quad_tol is not None:
        if not 0 < args.quad_tol < 1:
            raise ConfigError("--quad-tol must lie in (0, 1)")
        settings.QUAD_TOL = args.quad_tol
    if args.mc_samples is not None:
        if args.mc_samples < 1000:
            raise ConfigError("--mc-samples must be at least 1000")
        settings.MC_SAMPLES = args.mc_samples
    if args.seed is not None:
        settings.SEED = args.seed
    if args.jobs is not None:
        if args.jobs < 1:
            raise ConfigError("--jobs must be positive")
        settings.JOBS = args.jobs
    if args.out is not None:
        settings.OUTPUT_DIR = args.out


def load_experiment(args: argparse.Namespace) -> ExperimentConfig:
    """Experiment document with command-line overrides applied."""
    if not args.config:
        raise ConfigError("this command needs --config")
    config = storage_service.load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.out is not None:
        config.output = args.out
    if args.quad_tol is not None:
        config.tolerances.quad_tol = args.quad_tol
    if args.mc_samples is not None:
        config.tolerances.mc_samples = args.mc_samples
    settings.MC_SAMPLES = config.tolerances.mc_samples
    return config


def measure_from_args(args: argparse.Namespace, dim: int) -> Optional[LogConcaveMeasure]:
    """None means Lebesgue measure."""
    if not args.measure:
        return None
    spec = MeasureSpec(kind=MeasureKind(args.measure), params=args.params, body=args.measure_body)
    return measure_service.from_spec(spec, dim)


def output_dir(args: argparse.Namespace, default: Path) -> Path:
    return Path(args.out) if args.out else default

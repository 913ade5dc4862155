"""Single-body commands: symmetrize, polar, volume, product, generate."""
import argparse
import logging
from pathlib import Path
from typing import List

from app.cli.common import EXIT_OK, measure_from_args, measure_options, output_dir
from app.core.config import settings
from app.core.exceptions import ConfigError
from app.models.geometry import HPolytope
from app.schemas.estimate_schema import EstimateMethod
from app.services.body_service import body_service
from app.services.corpus_service import corpus_service
from app.services.integration_service import integration_service
from app.services.storage_service import storage_service
from app.services.symmetrization_service import symmetrization_service
from app.services.verification_service import verification_service
from app.utils.file_utils import format_estimate

logger = logging.getLogger(__name__)


def register(subparsers, parents: List[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("symmetrize", parents=parents, help="Steiner symmetral of a body file")
    parser.add_argument("body", help="body file")
    parser.add_argument("--axis", default="all", help="axis 1..n, or 'all' for the unconditionalization pipeline")
    parser.set_defaults(func=cmd_symmetrize)

    parser = subparsers.add_parser("polar", parents=parents, help="polar body of a body file")
    parser.add_argument("body", help="body file")
    parser.set_defaults(func=cmd_polar)

    parser = subparsers.add_parser("volume", parents=parents, help="volume or measure of a body")
    parser.add_argument("body", help="body file")
    measure_options(parser)
    parser.set_defaults(func=cmd_volume)

    parser = subparsers.add_parser("product", parents=parents, help="volume product of a body")
    parser.add_argument("body", help="body file")
    parser.add_argument("--section", help="body file L for the section product P_L")
    measure_options(parser)
    parser.set_defaults(func=cmd_product)

    parser = subparsers.add_parser("generate", parents=parents, help="write a random corpus of body files")
    parser.add_argument("--dim", type=int, required=True)
    parser.add_argument("--count", type=int, default=10)
    parser.add_argument("--pairs", type=int, help="vertex pairs per body (default dim + 2)")
    parser.set_defaults(func=cmd_generate)


def _load_polytope(path: str) -> HPolytope:
    body = body_service.as_integrable(storage_service.load_body(path))
    if not isinstance(body, HPolytope):
        raise ConfigError(f"{path} does not describe a polytope")
    return body


def cmd_symmetrize(args: argparse.Namespace) -> int:
    H = _load_polytope(args.body)
    source = Path(args.body)
    out = output_dir(args, source.parent)
    volume_before = integration_service.volume_exact(H).value

    if args.axis == "all":
        steps = symmetrization_service.unconditionalize_steps(H)
        if not steps:
            steps = [(None, symmetrization_service.unconditionalize(H))]
        names = [f"{source.stem}_steiner_axis{axis + 1}" for axis, _ in steps[:-1]]
        names.append(f"{source.stem}_unconditional")
    else:
        try:
            axis = int(args.axis) - 1
        except ValueError:
            raise ConfigError(f"axis must be an integer or 'all', got {args.axis!r}")
        if not 0 <= axis < H.dim:
            raise ConfigError(f"axis must lie in 1..{H.dim}")
        steps = [(axis, symmetrization_service.steiner(H, axis))]
        names = [f"{source.stem}_steiner_axis{axis + 1}"]

    previous = H
    for (axis, body), name in zip(steps, names):
        path = storage_service.save_body(body, out / f"{name}.json", name)
        label = "snap" if axis is None else f"axis {axis + 1}"
        print(f"{label}: facets {previous.n_facets} -> {body.n_facets}, wrote {path}")
        previous = body

    volume_after = integration_service.volume_exact(previous).value
    print(f"volume: {volume_before:.12g} -> {volume_after:.12g}")
    return EXIT_OK


def cmd_polar(args: argparse.Namespace) -> int:
    body = storage_service.load_body(args.body)
    polar = body_service.polar(body)
    source = Path(args.body)
    name = f"{source.stem}_polar"
    path = storage_service.save_body(polar, output_dir(args, source.parent) / f"{name}.json", name)
    volume = integration_service.volume_exact(body_service.as_integrable(polar))
    print(f"polar: {polar!r}")
    print(f"volume: {format_estimate(volume.value, volume.err)}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_volume(args: argparse.Namespace) -> int:
    body = storage_service.load_body(args.body)
    mu = measure_from_args(args, body.dim)
    estimate = integration_service.measure(
        mu,
        body_service.as_integrable(body),
        settings.QUAD_TOL,
        EstimateMethod(args.engine),
        settings.MC_SAMPLES,
        settings.SEED
    )
    print(format_estimate(estimate.value, estimate.err))
    return EXIT_OK


def cmd_product(args: argparse.Namespace) -> int:
    body = storage_service.load_body(args.body)
    mu = measure_from_args(args, body.dim)
    section = storage_service.load_body(args.section) if args.section else None
    if section is not None and mu is not None:
        raise ConfigError("--section and --measure cannot be combined")
    estimate = verification_service.volume_product(
        body,
        mu,
        section,
        settings.QUAD_TOL,
        EstimateMethod(args.engine),
        settings.MC_SAMPLES,
        settings.SEED
    )
    print(f"P = {format_estimate(estimate.value, estimate.err)}")
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    if args.dim < 2 or args.dim > settings.MAX_EXACT_DIM:
        raise ConfigError(f"--dim must lie in 2..{settings.MAX_EXACT_DIM}")
    if args.count < 1:
        raise ConfigError("--count must be positive")
    entries = corpus_service.generate(args.dim, args.count, args.pairs, settings.SEED)
    paths = corpus_service.write_corpus(entries, output_dir(args, Path(settings.OUTPUT_DIR) / "corpus"))
    for path in paths:
        print(path)
    logger.info(f"Generated {len(paths)} bodies in dimension {args.dim}")
    return EXIT_OK

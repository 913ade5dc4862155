"""Exploratory commands: dilation sweeps and the even-measure comparison."""
import argparse
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional

from app.cli.common import EXIT_OK, load_experiment
from app.core.exceptions import ConfigError
from app.models.measure import LogConcaveMeasure
from app.schemas.estimate_schema import VerificationReport, VolumeEstimate
from app.services.body_service import body_service
from app.services.corpus_service import corpus_service
from app.services.integration_service import integration_service
from app.services.measure_service import measure_service
from app.services.storage_service import storage_service
from app.services.verification_service import verification_service

logger = logging.getLogger(__name__)

RADIUS_COLUMNS = ["measure_id", "r", "product", "err"]
T_COLUMNS = ["measure_id", "t", "log_measure", "err"]


def register(subparsers, parents: List[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "sweep",
        parents=parents,
        help="P_mu(rB) over a radius grid and log mu(e^t B) over a t grid"
    )
    parser.add_argument("--no-plot", action="store_true", help="write CSV files only")
    parser.set_defaults(func=cmd_sweep)

    parser = subparsers.add_parser(
        "explore",
        parents=parents,
        help="compare P_mu(K) with P_mu(B) for even, not necessarily unconditional, measures"
    )
    parser.add_argument("--section", help="body file L for the section products P_L(K) and P_L(B)")
    parser.set_defaults(func=cmd_explore)


def _ball_measure(mu: Optional[LogConcaveMeasure], n: int, radius: float, tol: float) -> VolumeEstimate:
    if mu is None:
        return integration_service.volume_exact(body_service.make_ball(n, radius))
    return integration_service.ball_measure(mu, radius, tol)


def radius_rows(mu: Optional[LogConcaveMeasure], n: int, radii, tol: float) -> List[Dict]:
    """P_mu(rB) = mu(rB) mu(B/r), since (rB)^o = B/r."""
    measure_id = "lebesgue" if mu is None else mu.measure_id
    rows = []
    for r in radii:
        product = _ball_measure(mu, n, r, tol).times(_ball_measure(mu, n, 1.0 / r, tol))
        rows.append({"measure_id": measure_id, "r": float(r), "product": product.value, "err": product.err})
    return rows


def t_rows(mu: Optional[LogConcaveMeasure], n: int, t_grid, tol: float) -> List[Dict]:
    """log mu(e^t B); the error is first-order in the relative error of mu."""
    measure_id = "lebesgue" if mu is None else mu.measure_id
    rows = []
    for t in t_grid:
        value = _ball_measure(mu, n, math.exp(t), tol)
        if value.value <= 0:
            raise ConfigError(f"mu(e^t B) vanishes at t={t}")
        rows.append({
            "measure_id": measure_id,
            "t": float(t),
            "log_measure": math.log(value.value),
            "err": value.err / value.value,
        })
    return rows


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_experiment(args)
    if config.sweep is None:
        raise ConfigError("the sweep command needs a 'sweep' section")
    n = config.dim
    tol = config.tolerances.quad_tol
    measures = [measure_service.from_spec(spec, n) for spec in config.measures] or [None]
    out = Path(config.output)

    if config.sweep.radii:
        rows = []
        for mu in measures:
            series = radius_rows(mu, n, config.sweep.radii, tol)
            rows.extend(series)
            if not args.no_plot:
                storage_service.plot_sweep(
                    series, "r", "product",
                    out / f"sweep_radius_{series[0]['measure_id']}.png",
                    title=f"P(rB), n={n}"
                )
        print(f"wrote {storage_service.write_sweep(rows, RADIUS_COLUMNS, out, 'sweep_radius.csv')}")

    if config.sweep.t_grid:
        rows = []
        for mu in measures:
            series = t_rows(mu, n, config.sweep.t_grid, tol)
            rows.extend(series)
            if not args.no_plot:
                storage_service.plot_sweep(
                    series, "t", "log_measure",
                    out / f"sweep_t_{series[0]['measure_id']}.png",
                    title=f"log mu(e^t B), n={n}"
                )
        print(f"wrote {storage_service.write_sweep(rows, T_COLUMNS, out, 'sweep_t.csv')}")
    return EXIT_OK


def cmd_explore(args: argparse.Namespace) -> int:
    config = load_experiment(args)
    if not config.measures:
        raise ConfigError("the explore command needs at least one measure")
    entries = corpus_service.build_corpus(config)
    measures = [measure_service.from_spec(spec, config.dim) for spec in config.measures]
    section = storage_service.load_body(args.section) if args.section else None
    tol = config.tolerances.quad_tol

    reports: List[VerificationReport] = []
    for entry in entries:
        for index, mu in enumerate(measures):
            # section rows do not depend on mu
            L = section if index == 0 else None
            reports.extend(verification_service.explore_even(mu, entry.body, L, tol, entry.body_id))

    for report in reports:
        report.seed = config.seed
    path = storage_service.write_reports(reports, config.output, name="explore.csv")
    below = sum(report.passed for report in reports)
    print(f"explore: {below}/{len(reports)} rows with lhs <= rhs within slack")
    print(f"reports: {path}")
    logger.info(f"Exploration finished with seed {config.seed} and quad_tol {tol}")
    return EXIT_OK

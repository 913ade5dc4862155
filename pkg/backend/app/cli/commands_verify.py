"""The verify command: corpus × measures × checks to reports.csv."""
import argparse
import logging
from typing import Dict, List

from app.cli.common import EXIT_FAILED, EXIT_OK, load_experiment
from app.schemas.estimate_schema import VerificationReport
from app.services.batch_service import batch_service
from app.services.corpus_service import corpus_service
from app.services.storage_service import storage_service

logger = logging.getLogger(__name__)


def register(subparsers, parents: List[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "verify",
        parents=parents,
        help="run the configured checks and write reports.csv"
    )
    parser.set_defaults(func=cmd_verify)


def summarize(checks, reports: List[VerificationReport]) -> Dict[str, List[VerificationReport]]:
    """Reports grouped by the check that produced them."""
    groups = {check.value: [] for check in checks}
    for report in reports:
        for name, group in groups.items():
            if report.inequality_id == name or report.inequality_id.startswith(name + "_"):
                group.append(report)
                break
    return groups


def cmd_verify(args: argparse.Namespace) -> int:
    config = load_experiment(args)
    entries = corpus_service.build_corpus(config)
    items = corpus_service.build_items(config, entries)
    logger.info(f"Verifying {len(items)} items with seed {config.seed}")

    reports = batch_service.run(items, args.jobs)
    path = storage_service.write_reports(reports, config.output)

    all_passed = True
    for name, group in summarize(config.checks, reports).items():
        passed = sum(report.passed for report in group)
        print(f"{name}: {passed}/{len(group)} passed")
        all_passed = all_passed and passed == len(group)
    print(f"reports: {path}")

    if not all_passed:
        for report in reports:
            if not report.passed:
                logger.warning(
                    f"{report.inequality_id} failed for body={report.body_id} "
                    f"measure={report.measure_id}: margin {report.margin:.3g}, slack {report.slack:.3g}"
                )
        return EXIT_FAILED
    return EXIT_OK

"""Command-line application."""
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.cli import commands_bodies, commands_sweep, commands_verify
from app.cli.common import EXIT_ERROR, apply_overrides, common_parser
from app.core.config import settings
from app.core.exceptions import ConfigError, GeometryError, MeasureError
from app.core.logging_config import setup_logging

logger = logging.getLogger(__name__)


class CommandParser(argparse.ArgumentParser):
    """Usage errors are config errors (exit 1); exit 2 is reserved for failed checks."""

    def error(self, message):
        raise ConfigError(message)


def build_parser() -> CommandParser:
    common = common_parser()
    parser = CommandParser(
        prog="santalo",
        description=f"{settings.PROJECT_NAME} v{settings.VERSION}: symmetric convex bodies, "
                    "log-concave measures and volume-product inequalities"
    )
    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True

    # Register command modules
    commands_verify.register(subparsers, [common])
    commands_bodies.register(subparsers, [common])
    commands_sweep.register(subparsers, [common])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
        setup_logging(args.log_level)
        logger.info(f"Starting {settings.PROJECT_NAME} v{settings.VERSION}: {args.command}")
        apply_overrides(args)
        return args.func(args)
    except ValidationError as e:
        print(f"error: invalid configuration\n{e}", file=sys.stderr)
    except (ConfigError, MeasureError, GeometryError) as e:
        print(f"error: {e}", file=sys.stderr)
    except OSError as e:
        print(f"error: {e.strerror or e}: {e.filename or ''}".rstrip(": "), file=sys.stderr)
    logger.error("Command failed")
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""
Main CLI Entry Point
CM ray class invariants and Weber generation checks
"""

from typing import List, Optional
import argparse
import sys

from pydantic import ValidationError

from src.config.constants import EXIT_FAIL, EXIT_USAGE
from src.config.settings import settings
from src.utils.exceptions import CMFieldError
from src.utils.logger import setup_logger
from src.middleware.logging_middleware import LoggingMiddleware

# Import commands
from src.commands import field, rayclass, table, verify

# Setup logger
logger = setup_logger()


def build_parser() -> argparse.ArgumentParser:
    """Top-level parser with one subcommand per command module"""
    parser = argparse.ArgumentParser(
        prog=settings.APP_NAME,
        description="Ray class invariants of imaginary quadratic fields and Weber generation checks",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Include commands
    field.add_parser(subparsers)
    rayclass.add_parser(subparsers)
    table.add_parser(subparsers)
    verify.add_parser(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run the command and map errors to exit codes

    Args:
        argv: Arguments without the program name (sys.argv[1:] if None)

    Returns:
        int: 0 pass, 1 fail, 2 usage, 3 indeterminate
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0

    try:
        return LoggingMiddleware().dispatch(args, args.handler)
    except CMFieldError as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        return e.exit_code
    except ValidationError as e:
        logger.error(f"Invalid input: {e.errors()}")
        return EXIT_USAGE
    except Exception as e:
        logger.error(f"Unhandled exception: {str(e)}", exc_info=True)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

"""
Command Helpers
Shared arguments, precision contexts and report output for the CLI commands
"""

import argparse
import time
import sys
from typing import Any, Dict, Optional

from src.config.settings import settings
from src.models.precision import PrecisionContext
from src.schemas.report import PrecisionInfo
from src.utils.helpers import dump_json


def add_precision_arguments(parser: argparse.ArgumentParser) -> None:
    """--digits, --guard, --threads and --timing"""
    parser.add_argument("--digits", type=int, default=None, help="Working decimal digits (>= 30)")
    parser.add_argument("--guard", type=int, default=settings.GUARD_DIGITS, help="Guard digits (>= 10)")
    parser.add_argument(
        "--threads", type=int, default=settings.THREADS,
        help="Worker processes for invariant tables (0 = available parallelism)",
    )
    parser.add_argument("--timing", action="store_true", help="Record wall-clock timing in the report")


def resolve_digits(args: argparse.Namespace, default: Optional[int] = None) -> int:
    if args.digits is not None:
        return args.digits
    return default if default is not None else settings.DEFAULT_DIGITS


def context_from(args: argparse.Namespace, default_digits: Optional[int] = None) -> PrecisionContext:
    """PrecisionContext from the parsed flags (pydantic validates the bounds)"""
    return PrecisionContext(
        digits=resolve_digits(args, default_digits),
        guard=args.guard,
        max_escalations=settings.MAX_ESCALATIONS,
    )


def workers_from(args: argparse.Namespace) -> int:
    if args.threads > 0:
        return args.threads
    return settings.worker_count


def precision_info(ctx: PrecisionContext, cutoff: Optional[int] = None) -> PrecisionInfo:
    return PrecisionInfo(
        digits=ctx.digits,
        guard=ctx.guard,
        max_escalations=ctx.max_escalations,
        cutoff=cutoff,
    )


def emit(document: Dict[str, Any]) -> None:
    """Write a JSON document to stdout"""
    sys.stdout.write(dump_json(document) + "\n")


def emit_text(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def timing_from(args: argparse.Namespace) -> Optional[Dict[str, float]]:
    """{"seconds": ...} since the command started, or None without --timing"""
    if not getattr(args, "timing", False):
        return None
    return {"seconds": round(time.perf_counter() - args.started_at, 3)}

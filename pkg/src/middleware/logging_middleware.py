"""
Logging Middleware
Logs every CLI command with its duration and outcome
"""

import argparse
import time
from typing import Callable

from src.utils.logger import setup_logger

logger = setup_logger()

Handler = Callable[[argparse.Namespace], int]


class LoggingMiddleware:
    """Wraps command handlers to log start, duration and exit code"""

    def dispatch(self, args: argparse.Namespace, call_next: Handler) -> int:
        """Run the handler and log details"""
        start_time = time.perf_counter()
        args.started_at = start_time

        # Log command
        logger.info(f"Command: {args.command} | Args: {self._describe(args)}")

        try:
            code = call_next(args)

            duration = time.perf_counter() - start_time
            logger.info(
                f"Finished: {args.command} | "
                f"Exit: {code} | "
                f"Duration: {duration:.3f}s"
            )

            return code

        except Exception:
            # logger.exception keeps braces in messages intact
            duration = time.perf_counter() - start_time
            logger.exception(
                f"Error: {args.command} | "
                f"Duration: {duration:.3f}s"
            )
            raise

    def _describe(self, args: argparse.Namespace) -> str:
        skipped = {"command", "handler", "started_at"}
        return " ".join(f"{k}={v}" for k, v in sorted(vars(args).items()) if k not in skipped)

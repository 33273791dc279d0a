"""
Table Command
Fricke and Siegel-Ramachandra invariants of every class of Cl(N)
"""

import argparse

from src.commands.common import add_precision_arguments, context_from, emit_text, workers_from
from src.config.constants import EXIT_PASS
from src.schemas.report import OutputFormatEnum
from src.services.invariant_service import invariant_service
from src.services.quadfield_service import quadfield_service
from src.services.rayclass_service import rayclass_service
from src.utils.exceptions import OutOfScope
from src.utils.logger import setup_logger

logger = setup_logger()


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser("table", help="Invariant table of Cl(N)")
    parser.add_argument("--dk", type=int, required=True, help="Fundamental discriminant d_K < 0")
    parser.add_argument("-N", type=int, required=True, help="Level N > 1")
    parser.add_argument(
        "--format", dest="output_format", choices=[f.value for f in OutputFormatEnum],
        default=OutputFormatEnum.json.value, help="Output format",
    )
    add_precision_arguments(parser)
    parser.set_defaults(handler=cmd_table)


def cmd_table(args: argparse.Namespace) -> int:
    """table --dk D -N N --format json|csv"""
    if args.N < 2:
        raise OutOfScope("table needs N > 1")
    ctx = context_from(args)
    field = quadfield_service.make_field(args.dk)
    group = rayclass_service.rational_group(field, args.N)
    table = invariant_service.invariant_table(group, ctx, workers_from(args))
    logger.info(f"Exporting {len(table)} invariants of {group} as {args.output_format}")
    emit_text(invariant_service.export_table(table, args.output_format))
    return EXIT_PASS

"""
Field Command
Discriminant, CM point, class group and prime splitting of a field
"""

import argparse

from sympy import primerange

from src.commands.common import add_precision_arguments, context_from, emit, emit_text
from src.config.constants import EXIT_PASS, SPLITTING_TABLE_BOUND
from src.models.precision import PrecisionContext
from src.schemas.field import FieldInfo, PrimeSplitting
from src.services.modforms_service import modforms_service
from src.services.quadfield_service import quadfield_service
from src.services.rayclass_service import rayclass_service
from src.utils.helpers import format_complex
from src.utils.logger import setup_logger

logger = setup_logger()

SPLITTING_KINDS = {1: "split", 0: "ramified", -1: "inert"}


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser("field", help="Field summary")
    parser.add_argument("--dk", type=int, required=True, help="Fundamental discriminant d_K < 0")
    parser.add_argument("--json", action="store_true", help="Emit JSON")
    add_precision_arguments(parser)
    parser.set_defaults(handler=cmd_field_info)


def field_info(d: int, digits: int = 30, guard: int = 10) -> FieldInfo:
    """
    Build the field summary

    Args:
        d: Discriminant
        digits: Digits for tau_K and j(tau_K)
        guard: Guard digits

    Returns:
        FieldInfo
    """
    field = quadfield_service.make_field(d)
    class_group = rayclass_service.class_group(field)
    splitting = []
    for p in primerange(2, SPLITTING_TABLE_BOUND + 1):
        factors = quadfield_service.factor_rational_prime(field, p)
        symbol = quadfield_service.kronecker_symbol(d, p)
        splitting.append(PrimeSplitting(
            p=p,
            kronecker=symbol,
            kind=SPLITTING_KINDS[symbol],
            ideals=[str(prime) for prime, _ in factors],
            exponents=[e for _, e in factors],
        ))

    ctx = PrecisionContext(digits=digits, guard=guard)
    with ctx.workdps():
        tau = format_complex(field.tau(), digits)
        j_value = None
        if not modforms_service.is_exceptional(field):
            j_value = format_complex(modforms_service.j_at_cm(field, ctx), digits)

    return FieldInfo(
        d_K=d,
        tau_K=tau,
        unit_count=field.unit_count,
        class_number=class_group.order,
        class_group=list(class_group.snf),
        reduced_forms=[list(form) for form in quadfield_service.reduced_forms(d)],
        different_norm=int(quadfield_service.different(field).norm()),
        j_tau_K=j_value,
        splitting=splitting,
    )


def render_text(info: FieldInfo) -> str:
    lines = [
        f"d_K            {info.d_K}",
        f"tau_K          {info.tau_K['re']} + {info.tau_K['im']} i",
        f"units          {info.unit_count}",
        f"class number   {info.class_number}  ({' x '.join(f'Z/{d}' for d in info.class_group) or 'trivial'})",
        f"reduced forms  {' '.join(str(tuple(form)) for form in info.reduced_forms)}",
        f"N(different)   {info.different_norm}",
    ]
    if info.j_tau_K is not None:
        lines.append(f"j(tau_K)       {info.j_tau_K['re']} + {info.j_tau_K['im']} i")
    lines.append("splitting")
    for row in info.splitting:
        lines.append(f"  p={row.p:<3} {row.kind:<9} {', '.join(row.ideals)}")
    return "\n".join(lines)


def cmd_field_info(args: argparse.Namespace) -> int:
    """field --dk D"""
    ctx = context_from(args, default_digits=30)
    info = field_info(args.dk, ctx.digits, ctx.guard)
    logger.info(f"Field d={args.dk}: h={info.class_number}")
    if args.json:
        emit(info.model_dump(mode="json"))
    else:
        emit_text(render_text(info))
    return EXIT_PASS

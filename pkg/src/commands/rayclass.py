"""
Ray Class Command
Cl(N) in Smith normal form with its subgroup tower and degree cross-checks
"""

import argparse

from sympy import divisors

from src.commands.common import emit, emit_text
from src.config.constants import EXIT_FAIL, EXIT_PASS
from src.schemas.rayclass import DegreeCheck, LevelSubgroup, RayClassReport
from src.services.quadfield_service import quadfield_service
from src.services.rayclass_service import rayclass_service
from src.utils.exceptions import OutOfScope
from src.utils.logger import log_check, setup_logger

logger = setup_logger()


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser("rayclass", help="Ray class group modulo (N)")
    parser.add_argument("--dk", type=int, required=True, help="Fundamental discriminant d_K < 0")
    parser.add_argument("-N", type=int, required=True, help="Level N > 1")
    parser.add_argument("--check", action="store_true", help="Cross-check the degree formulas")
    parser.add_argument("--json", action="store_true", help="Emit JSON")
    parser.set_defaults(handler=cmd_rayclass)


def degree_checks(d: int, N: int) -> list:
    """Degree formulas against the enumerated groups"""
    field = quadfield_service.make_field(d)
    group = rayclass_service.rational_group(field, N)
    h = rayclass_service.class_group(field).order
    ring = rayclass_service.subgroup_ring(group)
    checks = [
        DegreeCheck(
            name="order_formula",
            formula=rayclass_service.expected_order(field, group.modulus),
            enumerated=group.order,
            passed=rayclass_service.expected_order(field, group.modulus) == group.order,
        ),
        DegreeCheck(
            name="K_N_over_H",
            formula=rayclass_service.degree_KN_over_H(field, N),
            enumerated=group.order // h,
            passed=rayclass_service.degree_KN_over_H(field, N) * h == group.order,
        ),
        DegreeCheck(
            name="H_N_over_H",
            formula=rayclass_service.degree_ring_over_H(field, N),
            enumerated=group.order // (h * ring.order),
            passed=rayclass_service.degree_ring_over_H(field, N) * h * ring.order == group.order,
        ),
    ]
    for M in divisors(N):
        if M == N:
            continue
        level = rayclass_service.rational_group(field, M)
        kernel = rayclass_service.kernel(group, level)
        checks.append(DegreeCheck(
            name=f"tower_{M}",
            formula=group.order,
            enumerated=kernel.order * level.order,
            passed=kernel.order * level.order == group.order,
        ))
    return checks


def rayclass_report(d: int, N: int, check: bool = False) -> RayClassReport:
    """
    Build the ray class summary

    Args:
        d: Discriminant
        N: Level
        check: Include degree cross-checks

    Returns:
        RayClassReport
    """
    if N < 2:
        raise OutOfScope("rayclass needs N > 1")
    field = quadfield_service.make_field(d)
    group = rayclass_service.rational_group(field, N)
    levels = []
    for M in divisors(N):
        level = rayclass_service.rational_group(field, M)
        levels.append(LevelSubgroup(
            M=M,
            order=rayclass_service.kernel(group, level).order,
            cl_M_order=level.order,
        ))
    _, ring_kernel = rayclass_service.ring_class_map(group)
    return RayClassReport(
        d_K=d,
        N=N,
        order=group.order,
        snf=list(group.snf),
        generators=[str(g) for g in group.generators],
        class_number=rayclass_service.class_group(field).order,
        hilbert_subgroup_order=rayclass_service.subgroup_hilbert(group).order,
        ring_subgroup_order=rayclass_service.subgroup_ring(group).order,
        level_subgroups=levels,
        ring_class_kernel=ring_kernel,
        degree_KN_over_H=rayclass_service.degree_KN_over_H(field, N),
        degree_ring_over_H=rayclass_service.degree_ring_over_H(field, N),
        collapses_to_half=rayclass_service.collapses_to_half(field, N),
        collapsing_divisors=rayclass_service.collapsing_divisors(field, N),
        checks=degree_checks(d, N) if check else None,
    )


def render_text(report: RayClassReport) -> str:
    lines = [
        f"Cl({report.N}) over d_K={report.d_K}: order {report.order}, "
        f"{' x '.join(f'Z/{d}' for d in report.snf) or 'trivial'}",
        f"h_K                 {report.class_number}",
        f"|Cl(K_(N)/H)|       {report.hilbert_subgroup_order}",
        f"|Cl(K_(N)/H_N)|     {report.ring_subgroup_order}",
        f"[K_(N):H]           {report.degree_KN_over_H}",
        f"[H_N:H]             {report.degree_ring_over_H}",
        f"collapses to N/2    {report.collapses_to_half}",
    ]
    for level in report.level_subgroups:
        lines.append(f"  M={level.M:<4} |Cl(M)|={level.cl_M_order:<6} |ker(Cl(N)->Cl(M))|={level.order}")
    for check in report.checks or []:
        lines.append(f"  check {check.name:<16} {'PASS' if check.passed else 'FAIL'}")
    return "\n".join(lines)


def cmd_rayclass(args: argparse.Namespace) -> int:
    """rayclass --dk D -N N"""
    report = rayclass_report(args.dk, args.N, args.check)
    passed = all(check.passed for check in report.checks or [])
    for check in report.checks or []:
        log_check(f"rayclass d={args.dk} N={args.N} {check.name}", check.passed,
                  f"formula={check.formula} enumerated={check.enumerated}")
    if args.json:
        emit(report.model_dump(mode="json"))
    else:
        emit_text(render_text(report))
    return EXIT_PASS if passed else EXIT_FAIL

"""
Verify Command
Verification suites and their versioned reports
"""

import argparse
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, List, Optional
import math

import mpmath
import numpy as np
from pydantic import ValidationError

from src.commands.common import (
    add_precision_arguments,
    context_from,
    emit,
    precision_info,
    timing_from,
    workers_from,
)
from src.config.constants import (
    EXCLUDED_LEVELS,
    EXIT_FAIL,
    EXIT_INDETERMINATE,
    EXIT_PASS,
    T_CHOICE_FIXED_ROWS,
    T_CHOICE_GCDS,
)
from src.config.settings import settings
from src.models.character import Character
from src.models.precision import HPoint, PrecisionContext, TorsionVector
from src.models.rayclass import RayClassGroup
from src.schemas.report import CheckResult, Report, RunConfig, SuiteEnum
from src.schemas.theorem import VerdictEnum
from src.services.character_service import character_service
from src.services.invariant_service import invariant_service
from src.services.limitformula_service import limitformula_service
from src.services.modforms_service import modforms_service
from src.services.quadfield_service import quadfield_service
from src.services.rayclass_service import rayclass_service
from src.services.theorem_service import satisfies_c1, theorem_service
from src.utils.exceptions import CMFieldError, Indeterminate, OutOfScope, PrecisionExhausted
from src.utils.helpers import format_complex, format_exponent
from src.utils.logger import log_check, setup_logger

logger = setup_logger()

DEFAULT_LEVELS = {
    SuiteEnum.kronecker: [5],
    SuiteEnum.decomposition: [9, 12],
    SuiteEnum.case_constants: [5, 9, 8, 12],
    SuiteEnum.main: [5, 7, 8, 9, 12],
}

DEFAULT_MAX_N = 500
FRICKE_SIEGEL_MAX_DENOMINATOR = 12
WELL_DEFINED_SAMPLE = 10
KRONECKER_TOLERANCE = mpmath.mpf(10) ** -3


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="Run a verification suite")
    parser.add_argument("suite", choices=[s.value for s in SuiteEnum], help="Suite to run")
    parser.add_argument("--dk", type=int, nargs="+", default=[-20], help="Discriminants")
    parser.add_argument("-N", type=int, nargs="+", default=None, help="Levels")
    parser.add_argument("--cutoff", type=int, default=None, help="L-series cutoff")
    parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED, help="Seed of randomized checks")
    parser.add_argument("--samples", type=int, default=settings.DEFAULT_SAMPLES, help="Random samples")
    parser.add_argument("--max-n", dest="max_n", type=int, default=DEFAULT_MAX_N, help="Largest N for table1")
    add_precision_arguments(parser)
    parser.set_defaults(handler=cmd_verify)


def guarded(name: str, inputs: Dict, check: Callable[[], CheckResult]) -> CheckResult:
    """
    Run one check, turning numerical dead ends into recorded results

    Indeterminate outcomes are marked as such; other domain failures
    (degenerate differences, exhausted searches) fail the check. Usage
    errors propagate.
    """
    try:
        return check()
    except (Indeterminate, PrecisionExhausted) as e:
        logger.warning(f"{name} {inputs}: indeterminate ({e.message})")
        return CheckResult(name=name, inputs=inputs, values={"error": e.message}, passed=False, indeterminate=True)
    except CMFieldError as e:
        if e.exit_code != EXIT_FAIL:
            raise
        log_check(f"{name} {inputs}", False, e.message)
        return CheckResult(name=name, inputs=inputs, values={"error": e.message}, passed=False)


# Fricke-Siegel identity

def sample_index(rng: np.random.Generator) -> TorsionVector:
    """Random non-integral torsion index with denominators at most 12"""
    while True:
        n1, n2 = (int(n) for n in rng.integers(1, FRICKE_SIEGEL_MAX_DENOMINATOR + 1, size=2))
        index = TorsionVector(Fraction(int(rng.integers(0, n1)), n1), Fraction(int(rng.integers(0, n2)), n2))
        if not index.is_integral():
            return index


def sample_tau(rng: np.random.Generator) -> HPoint:
    """Random point of the standard fundamental domain"""
    x = mpmath.mpf(float(rng.uniform(-0.5, 0.5)))
    y = mpmath.sqrt(1 - x ** 2) + mpmath.mpf(float(rng.uniform(0.05, 1.5)))
    return HPoint(mpmath.mpc(x, y))


def suite_fricke_siegel(args: argparse.Namespace, ctx: PrecisionContext, workers: int) -> List[CheckResult]:
    rng = np.random.default_rng(args.seed)
    results = []
    with ctx.workdps():
        for sample in range(args.samples):
            while True:
                u, v = sample_index(rng), sample_index(rng)
                if not (u + v).is_integral() and not (u + (-v)).is_integral():
                    break
            tau = sample_tau(rng)
            inputs = {"sample": sample, "u": [str(u.r1), str(u.r2)], "v": [str(v.r1), str(v.r2)],
                      "tau": format_complex(tau.tau, 20)}

            def check() -> CheckResult:
                residual = modforms_service.fricke_siegel_residual(u, v, tau, ctx)
                passed = residual < ctx.identity_tolerance
                log_check(f"fricke-siegel sample={sample}", passed, f"residual={format_exponent(residual)}")
                return CheckResult(
                    name="fricke-siegel", inputs=inputs,
                    residual=format_exponent(residual),
                    tolerance=format_exponent(ctx.identity_tolerance),
                    passed=passed,
                )

            results.append(guarded("fricke-siegel", inputs, check))
    return results


# Second limit formula

def primitive_character(group: RayClassGroup) -> Character:
    """First character whose conductor is the full modulus, else the first with a nontrivial one"""
    fallback = None
    for chi in character_service.iter_dual_group(group):
        if chi.is_principal():
            continue
        conductor = character_service.conductor(chi)
        if conductor == group.modulus:
            return chi
        if fallback is None and not conductor.is_unit():
            fallback = chi
    if fallback is None:
        raise OutOfScope(f"{group} has no character with a nontrivial conductor")
    return fallback


def suite_kronecker(args: argparse.Namespace, ctx: PrecisionContext, workers: int) -> List[CheckResult]:
    cutoff = args.cutoff or settings.DEFAULT_CUTOFF
    results = []
    for d, N in product(args.dk, args.N or DEFAULT_LEVELS[SuiteEnum.kronecker]):
        field = quadfield_service.make_field(d)
        group = rayclass_service.rational_group(field, N)
        chi = primitive_character(group)
        inputs = {"d_K": d, "N": N, "character": str(chi),
                  "conductor": str(character_service.conductor(chi)), "cutoff": cutoff}

        def check() -> CheckResult:
            sides = limitformula_service.kronecker_sides(chi, cutoff, ctx, check_gamma=False, workers=workers)
            residual = sides.residual
            passed = residual < KRONECKER_TOLERANCE
            log_check(f"kronecker d={d} N={N}", passed, f"residual={format_exponent(residual)}")
            return CheckResult(
                name="kronecker", inputs=inputs,
                values={
                    "lhs": format_complex(sides.lhs, 20),
                    "rhs": format_complex(sides.rhs, 20),
                    "l_value": format_complex(sides.l_value.value, 20),
                    "l_error": format_exponent(sides.l_value.error),
                    "euler_factor": format_complex(sides.euler_factor, 20),
                },
                residual=format_exponent(residual),
                tolerance=format_exponent(KRONECKER_TOLERANCE),
                passed=passed,
            )

        results.append(guarded("kronecker", inputs, check))

        def gamma_check() -> CheckResult:
            conductor = character_service.conductor(chi)
            first = limitformula_service.kronecker_rhs(
                chi, character_service.choose_gamma(field, conductor), ctx, workers)
            second = limitformula_service.kronecker_rhs(
                chi, character_service.choose_gamma(field, conductor, skip=1), ctx, workers)
            with ctx.workdps():
                spread = abs(first - second) / abs(first)
            passed = spread < ctx.identity_tolerance
            log_check(f"kronecker-gamma d={d} N={N}", passed, f"spread={format_exponent(spread)}")
            return CheckResult(
                name="kronecker-gamma", inputs=inputs,
                residual=format_exponent(spread),
                tolerance=format_exponent(ctx.identity_tolerance),
                passed=passed,
            )

        results.append(guarded("kronecker-gamma", inputs, gamma_check))
    return results


# Decomposition and case constants

def suite_decomposition(args: argparse.Namespace, ctx: PrecisionContext, workers: int) -> List[CheckResult]:
    results = []
    for d, N in product(args.dk, args.N or DEFAULT_LEVELS[SuiteEnum.decomposition]):
        field = quadfield_service.make_field(d)
        plan = theorem_service.case_plan(N)
        group = rayclass_service.rational_group(field, N)
        chi = theorem_service.build_character(group, plan)
        with_j_term = chi.is_trivial_on(rayclass_service.subgroup_hilbert(group))
        inputs = {"d_K": d, "N": N, "t": plan.t, "character": str(chi), "j_term": with_j_term}

        def check() -> CheckResult:
            sides = limitformula_service.decomposition_sides(chi, plan.t, ctx, with_j_term, workers)
            residual = sides.residual
            passed = residual < ctx.identity_tolerance
            log_check(f"decomposition d={d} N={N} t={plan.t}", passed, f"residual={format_exponent(residual)}")
            return CheckResult(
                name="decomposition", inputs=inputs,
                values={
                    "lhs": format_complex(sides.lhs, 30),
                    "rhs": format_complex(sides.rhs, 30),
                    "kernel_sums": dict(sides.kernel_sums),
                },
                residual=format_exponent(residual),
                tolerance=format_exponent(ctx.identity_tolerance),
                passed=passed,
            )

        results.append(guarded("decomposition", inputs, check))
    return results


def suite_case_constants(args: argparse.Namespace, ctx: PrecisionContext, workers: int) -> List[CheckResult]:
    results = []
    for d, N in product(args.dk, args.N or DEFAULT_LEVELS[SuiteEnum.case_constants]):
        field = quadfield_service.make_field(d)
        plan = theorem_service.case_plan(N)
        group = rayclass_service.rational_group(field, N)
        chi = theorem_service.build_character(group, plan)
        inputs = {"d_K": d, "N": N, "t": plan.t, "case": plan.case.value, "character": str(chi)}

        def check() -> CheckResult:
            result = limitformula_service.case_constant(chi, plan.t, plan.expected_constant, ctx, workers)
            return CheckResult(
                name="case-constant", inputs=inputs,
                values={
                    "ratio": format_complex(result.ratio, 40),
                    "expected": result.expected,
                    "stickelberger_abs": format_exponent(result.stickelberger_abs),
                },
                residual=format_exponent(result.deviation),
                tolerance=format_exponent(result.tolerance),
                passed=result.passed,
            )

        results.append(guarded("case-constant", inputs, check))
    return results


# Choice of t

def admissible_levels(max_n: int) -> List[int]:
    return [
        N for N in range(2, max_n + 1)
        if N not in EXCLUDED_LEVELS and math.gcd(72, N) in T_CHOICE_GCDS
    ]


def suite_choose_t(args: argparse.Namespace, ctx: PrecisionContext, workers: int) -> List[CheckResult]:
    failures: List[str] = []
    fallbacks: List[int] = []
    levels = admissible_levels(args.max_n)
    for N in levels:
        try:
            choice = theorem_service.choose_t(N)
        except ValidationError as e:
            failures.append(f"N={N}: {e.errors()[0]['msg']}")
            continue
        if N in T_CHOICE_FIXED_ROWS and choice.t != T_CHOICE_FIXED_ROWS[N]:
            failures.append(f"N={N}: listed t={T_CHOICE_FIXED_ROWS[N]}, chose {choice.t}")
        if choice.t != theorem_service.table_row(N):
            fallbacks.append(N)
        if not satisfies_c1(N, choice.t):
            failures.append(f"N={N}: t={choice.t} violates (C1)")
    passed = not failures
    log_check(f"table1 max_n={args.max_n}", passed, f"levels={len(levels)} failures={len(failures)}")
    return [CheckResult(
        name="table1",
        inputs={"max_n": args.max_n},
        values={"levels_checked": len(levels), "fallback_levels": fallbacks, "failures": failures},
        passed=passed,
    )]


# Generation

def well_defined_result(group: RayClassGroup, ctx: PrecisionContext, seed: int, workers: int) -> CheckResult:
    """Second representatives agree and translated tables permute the values"""
    table = invariant_service.invariant_table(group, ctx, workers)
    rng = np.random.default_rng(seed)
    classes = group.classes
    picks = sorted(rng.choice(len(classes), size=min(WELL_DEFINED_SAMPLE, len(classes)), replace=False))
    drift = mpmath.mpf(0)
    for index in picks:
        fricke_drift, log_drift = invariant_service.representative_drift(table, classes[int(index)])
        drift = max(drift, fricke_drift, log_drift)

    reference = [entry.fricke_value for entry in table.ordered_entries()]
    permutes = all(
        is_permutation(table.translated(group.basis_class(i)), reference, ctx.equal_threshold)
        for i in range(group.rank)
    )
    passed = drift < ctx.identity_tolerance and permutes
    log_check(f"well-defined {group}", passed, f"drift={format_exponent(drift)} permutes={permutes}")
    return CheckResult(
        name="well-defined",
        inputs={"d_K": group.field.d, "N": group.level, "sampled_classes": len(picks)},
        values={"translations_permute": permutes},
        residual=format_exponent(drift),
        tolerance=format_exponent(ctx.identity_tolerance),
        passed=passed,
    )


def is_permutation(values: List[mpmath.mpc], reference: List[mpmath.mpc], threshold: mpmath.mpf) -> bool:
    """Multiset equality of two value lists up to the threshold"""
    remaining = list(reference)
    for value in values:
        match = next((i for i, other in enumerate(remaining) if abs(value - other) < threshold), None)
        if match is None:
            return False
        remaining.pop(match)
    return not remaining


def main_results(d: int, N: int, ctx: PrecisionContext, seed: int, workers: int) -> List[CheckResult]:
    field = quadfield_service.make_field(d)
    group = rayclass_service.rational_group(field, N)
    inputs = {"d_K": d, "N": N}

    def check() -> CheckResult:
        verdict = theorem_service.verify_main(field, N, ctx, workers)
        fixing = invariant_service.fixing_group(group, ctx, workers)
        meets_hilbert = invariant_service.intersection_with_hilbert(group, fixing)
        orbit_ok = verdict.fixing_group_order * verdict.distinct_values == verdict.ray_class_order
        values = {
            "verdict": verdict.verdict.value,
            "generator": f"h({verdict.generator_used})",
            "fixing_group_order": verdict.fixing_group_order,
            "distinct_values": verdict.distinct_values,
            "ray_class_order": verdict.ray_class_order,
            "hilbert_intersection_order": meets_hilbert.order,
        }
        passed = verdict.verdict == VerdictEnum.generated and orbit_ok
        if verdict.collapses_to_half:
            values["half_level_kernel_matches"] = verdict.half_level_kernel_matches
            values["half_level_fixing_order"] = verdict.half_level_fixing_order
        else:
            passed = passed and meets_hilbert.is_trivial()
        return CheckResult(name="main", inputs=inputs, values=values, passed=passed)

    results = [guarded("main", inputs, check)]
    results.append(guarded("well-defined", inputs, lambda: well_defined_result(group, ctx, seed, workers)))

    if not rayclass_service.collapses_to_half(field, N):
        def hypotheses() -> CheckResult:
            report = theorem_service.b_conditions(field, N, ctx, workers)
            holds = {c.name: c.holds for c in report.conditions}
            return CheckResult(
                name="b-conditions", inputs={**inputs, "t": report.t},
                values={c.name: {"holds": c.holds, "detail": c.detail} for c in report.conditions},
                passed=holds["B2"] and holds["B3"],
            )

        results.append(guarded("b-conditions", inputs, hypotheses))
    return results


def suite_main(args: argparse.Namespace, ctx: PrecisionContext, workers: int) -> List[CheckResult]:
    results = []
    for d, N in product(args.dk, args.N or DEFAULT_LEVELS[SuiteEnum.main]):
        results.extend(main_results(d, N, ctx, args.seed, workers))
    return results


SUITES = {
    SuiteEnum.fricke_siegel: suite_fricke_siegel,
    SuiteEnum.kronecker: suite_kronecker,
    SuiteEnum.decomposition: suite_decomposition,
    SuiteEnum.case_constants: suite_case_constants,
    SuiteEnum.table1: suite_choose_t,
    SuiteEnum.main: suite_main,
}


def exit_code_for(report: Report) -> int:
    """Failures win over indeterminate checks"""
    if any(not r.passed and not r.indeterminate for r in report.results):
        return EXIT_FAIL
    if report.indeterminate:
        return EXIT_INDETERMINATE
    return EXIT_PASS


def run_suite(args: argparse.Namespace) -> Report:
    """
    Run one suite and wrap its results in a report

    Args:
        args: Parsed verify arguments

    Returns:
        Report
    """
    suite = SuiteEnum(args.suite)
    default_digits = settings.MAIN_DIGITS if suite == SuiteEnum.main else None
    ctx = context_from(args, default_digits=default_digits)
    workers = workers_from(args)
    cutoff: Optional[int] = None
    if suite == SuiteEnum.kronecker:
        cutoff = args.cutoff or settings.DEFAULT_CUTOFF

    config = RunConfig(
        command=f"verify {suite.value}",
        d_K=None if suite in (SuiteEnum.fricke_siegel, SuiteEnum.table1) else args.dk,
        N=None if suite in (SuiteEnum.fricke_siegel, SuiteEnum.table1) else (args.N or DEFAULT_LEVELS[suite]),
        digits=ctx.digits,
        guard=ctx.guard,
        cutoff=cutoff,
        seed=args.seed,
        samples=args.samples if suite == SuiteEnum.fricke_siegel else None,
        max_n=args.max_n if suite == SuiteEnum.table1 else None,
        threads=workers,
    )
    logger.info(f"Running suite {suite.value} at {ctx.digits} digits")
    results = SUITES[suite](args, ctx, workers)
    return Report(
        command=config.command,
        config=config,
        results=results,
        precision=precision_info(ctx, cutoff),
        timing=timing_from(args),
    )


def cmd_verify(args: argparse.Namespace) -> int:
    """verify SUITE [options]"""
    report = run_suite(args)
    emit(report.to_document())
    failed = sum(not r.passed for r in report.results)
    logger.info(f"{report.command}: {len(report.results) - failed}/{len(report.results)} checks passed")
    return exit_code_for(report)

"""
Limit Formula Service
Stickelberger elements, the sums S(chi, xi_t), smoothed Hecke L-values and
the checks built from them
"""

from fractions import Fraction
from math import isqrt
from typing import Iterable, List, Optional, Tuple

import mpmath
import numpy as np
from sympy import primerange

from src.config.constants import (
    J_FACTOR_J1728_EXPONENT,
    J_FACTOR_J_EXPONENT,
    J_FACTOR_THREE_EXPONENT,
    J_FACTOR_TWO_EXPONENT,
)
from src.models.character import Character
from src.models.field import FieldElement
from src.models.ideal import Ideal
from src.models.invariant_table import InvariantTable
from src.models.precision import PrecisionContext
from src.models.stickelberger import (
    CaseConstantResult,
    DecompositionSides,
    KroneckerSides,
    LValue,
    StickelbergerReport,
)
from src.services.character_service import character_service
from src.services.invariant_service import invariant_service
from src.services.quadfield_service import quadfield_service
from src.services.rayclass_service import rayclass_service
from src.utils.exceptions import OutOfScope
from src.utils.logger import log_check, setup_logger

logger = setup_logger()


def tree_sum(values: Iterable[mpmath.mpc]) -> mpmath.mpc:
    """Pairwise sum in a fixed tree so results do not depend on how terms were produced"""
    level: List[mpmath.mpc] = list(values)
    if not level:
        return mpmath.mpc(0)
    while len(level) > 1:
        paired = [level[i] + level[i + 1] for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            paired.append(level[-1])
        level = paired
    return level[0]


class LimitFormulaService:
    """Service for Stickelberger sums and the limit formula checks"""

    # Stickelberger elements

    def _weighted_log_sum(self, chi: Character, table: InvariantTable) -> mpmath.mpc:
        if table.modulus != chi.group.modulus:
            raise ValueError(f"table modulus {table.modulus} differs from {chi.group.modulus}")
        with table.ctx.workdps():
            return tree_sum(chi(entry.ray_class) * entry.log_abs_siegel for entry in table.ordered_entries())

    def stickelberger(self, chi: Character, table: InvariantTable) -> StickelbergerReport:
        """
        S(chi) = sum over Cl(m) of chi(C) ln|g_m(C)|

        Args:
            chi: Nonprincipal character of Cl(m)
            table: Invariant table of Cl(m)

        Returns:
            StickelbergerReport
        """
        if chi.is_principal():
            raise OutOfScope("the Stickelberger element needs a nonprincipal character")
        value = self._weighted_log_sum(chi, table)
        return StickelbergerReport(chi, value, table.modulus, table.ctx.digits, table.ctx.guard)

    def stickelberger_drift(self, chi: Character, ctx: PrecisionContext, workers: int = 1) -> mpmath.mpf:
        """|S(chi) at ctx - S(chi) at doubled digits|"""
        coarse = self.stickelberger(chi, invariant_service.invariant_table(chi.group, ctx, workers)).value
        fine_ctx = ctx.escalated()
        fine = self.stickelberger(chi, invariant_service.invariant_table(chi.group, fine_ctx, workers)).value
        with fine_ctx.workdps():
            return abs(fine - coarse)

    # Weber differences

    def s_chi_xi(self, chi: Character, t: int, ctx: PrecisionContext, workers: int = 1) -> mpmath.mpc:
        """
        S(chi, xi_t) = sum over Cl(N) of chi(C) ln|xi_t^sigma(C)|

        Args:
            chi: Character of Cl(N)
            t: Integer prime to N with t != +-1 mod N
            ctx: Precision context
            workers: Worker processes for the invariant table

        Returns:
            mpc
        """
        group = chi.group
        N = group.level
        if N is None:
            raise OutOfScope(f"{group.modulus} is not a rational modulus")
        invariant_service.check_xi_input(group.field, N, t)
        table = invariant_service.invariant_table(group, ctx, workers)
        with ctx.workdps():
            return tree_sum(
                chi(ray_class) * invariant_service.log_abs_conjugate_xi(table, t, ray_class)
                for ray_class in group.classes
            )

    def j_term(self, chi: Character, ctx: PrecisionContext) -> mpmath.mpc:
        """
        sum over Cl(N) of chi_bar(C) ln|(j^4N (j - 1728)^6N / 2^60N 3^48N)^sigma(C)|

        The conjugate of j under C is read off the image of C in Cl(O_K).
        """
        group = chi.group
        N = group.level
        field = group.field
        class_group = rayclass_service.class_group(field)
        logs = invariant_service.hilbert_log_abs_j(field, ctx)
        chi_bar = chi.conjugate()
        with ctx.workdps():
            constant = N * (
                J_FACTOR_TWO_EXPONENT * mpmath.log(2) + J_FACTOR_THREE_EXPONENT * mpmath.log(3)
            )
            terms = []
            for ray_class in group.classes:
                log_j, log_j1728 = logs[rayclass_service.project(group, class_group, ray_class).vector]
                weight = N * (J_FACTOR_J_EXPONENT * log_j + J_FACTOR_J1728_EXPONENT * log_j1728) - constant
                terms.append(chi_bar(ray_class) * weight)
            return tree_sum(terms)

    def _level_block(
        self, chi_bar: Character, t_shift: int, ctx: PrecisionContext, workers: int
    ) -> Tuple[mpmath.mpc, int]:
        """
        (N/N_pm) sum over B mod ker of chi_bar(B) ln|g_(N_pm)(C_{N_pm, n_pm})^sigma(B)|
        times the exact kernel sum of chi_bar
        """
        group = chi_bar.group
        N = group.level
        fraction = Fraction(t_shift, N)
        n_pm, N_pm = fraction.numerator, fraction.denominator
        level = rayclass_service.rational_group(group.field, N_pm)
        kernel = rayclass_service.kernel(group, level)
        kernel_sum = kernel.order if chi_bar.is_trivial_on(kernel) else 0
        if kernel_sum == 0:
            logger.debug(f"chi is nontrivial on ker(Cl({N}) -> Cl({N_pm})), level block vanishes")
            return mpmath.mpc(0), 0

        level_table = invariant_service.invariant_table(level, ctx, workers)
        base = rayclass_service.c_t(level, n_pm)
        seen = set()
        terms = []
        with ctx.workdps():
            for ray_class in group.classes:
                image = rayclass_service.project(group, level, ray_class)
                if image.vector in seen:
                    continue
                seen.add(image.vector)
                terms.append(chi_bar(ray_class) * level_table.log_abs_siegel(base * image))
            block = mpmath.mpf(N) / N_pm * tree_sum(terms) * kernel_sum
        return block, kernel_sum

    def decomposition_sides(
        self,
        chi: Character,
        t: int,
        ctx: PrecisionContext,
        with_j_term: bool = False,
        workers: int = 1,
    ) -> DecompositionSides:
        """
        Both sides of the expansion of S(chi_bar, xi_t) into level-N_pm blocks

        Args:
            chi: Character of Cl(N), nontrivial on Cl(K_(N)/H) unless with_j_term
            t: Integer prime to N with t != +-1 mod N
            ctx: Precision context
            with_j_term: Keep the j-factor sum instead of dropping it by orthogonality
            workers: Worker processes for the invariant tables

        Returns:
            DecompositionSides
        """
        group = chi.group
        if group.level is None:
            raise OutOfScope(f"{group.modulus} is not a rational modulus")
        if not with_j_term and chi.is_trivial_on(rayclass_service.subgroup_hilbert(group)):
            raise OutOfScope("chi is trivial on Cl(K_(N)/H); enable the j-term")

        chi_bar = chi.conjugate()
        lhs = self.s_chi_xi(chi_bar, t, ctx, workers)
        table = invariant_service.invariant_table(group, ctx, workers)

        sides = DecompositionSides(lhs=lhs, rhs=mpmath.mpc(0))
        for name, shift in (("plus", t + 1), ("minus", t - 1)):
            block, kernel_sum = self._level_block(chi_bar, shift, ctx, workers)
            sides.level_terms[name] = block
            sides.kernel_sums[name] = kernel_sum

        with ctx.workdps():
            s_bar = self._weighted_log_sum(chi_bar, table)
            c_t = rayclass_service.c_t(group, t)
            sides.stickelberger_term = -2 * (chi(c_t) + 1) * s_bar
            rhs = sides.level_terms["plus"] + sides.level_terms["minus"] + sides.stickelberger_term
            if with_j_term:
                sides.j_term = self.j_term(chi, ctx)
                rhs += sides.j_term
            sides.rhs = rhs
        return sides

    def decomposition_check(
        self,
        chi: Character,
        t: int,
        ctx: PrecisionContext,
        with_j_term: bool = False,
        workers: int = 1,
    ) -> mpmath.mpf:
        """Relative residual |LHS - RHS| / max(1, |RHS|) of the decomposition"""
        sides = self.decomposition_sides(chi, t, ctx, with_j_term, workers)
        residual = sides.residual
        log_check(
            f"decomposition d={chi.group.field.d} N={chi.group.level} t={t}",
            residual < ctx.identity_tolerance,
            f"residual={mpmath.nstr(residual, 5)}",
        )
        return residual

    def case_constant(
        self, chi: Character, t: int, expected: int, ctx: PrecisionContext, workers: int = 1
    ) -> CaseConstantResult:
        """
        Ratio S(chi_bar, xi_t) / S(chi_bar) against an expected integer

        Args:
            chi: Character from the matching construction
            t: Integer from the matching case
            expected: -2, -3 or -4
            ctx: Precision context
            workers: Worker processes for the invariant table

        Returns:
            CaseConstantResult
        """
        chi_bar = chi.conjugate()
        table = invariant_service.invariant_table(chi.group, ctx, workers)
        numerator = self.s_chi_xi(chi_bar, t, ctx, workers)
        denominator = self.stickelberger(chi_bar, table).value
        with ctx.workdps():
            result = CaseConstantResult(
                ratio=numerator / denominator,
                expected=expected,
                stickelberger_abs=abs(denominator),
                tolerance=mpmath.mpf(10) ** (-min(30, ctx.digits // 2)),
            )
        log_check(
            f"case-constant d={chi.group.field.d} N={chi.group.level} t={t}",
            result.passed,
            f"ratio={mpmath.nstr(result.ratio, 12)} expected={expected}",
        )
        return result

    # L-values

    def _local_coefficients(self, values: List[Tuple[Optional[complex], int]], p: int, cutoff: int) -> List[complex]:
        """
        Coefficients of p^k in prod over primes above p of 1/(1 - chi(P) p^(-deg P s))

        Args:
            values: (chi(P) or None when P divides the conductor, residue degree)
            p: Rational prime
            cutoff: Largest norm needed

        Returns:
            List indexed by k
        """
        top = 0
        power = p
        while power <= cutoff:
            top += 1
            power *= p
        coefficients = [1.0 + 0j] + [0j] * top
        for value, degree in values:
            if value is None:
                continue
            for k in range(degree, top + 1):
                coefficients[k] += value * coefficients[k - degree]
        return coefficients

    def _prime_values(self, chi0: Character, p: int, conductor_primes: set) -> List[Tuple[Optional[complex], int]]:
        """chi_0 at the primes above p, using chi(conj P) = chi((p)) / chi(P) for split p"""
        group = chi0.group
        field = group.field
        factors = quadfield_service.factor_rational_prime(field, p)

        def phase(exponent: Fraction) -> complex:
            return complex(np.exp(2j * np.pi * float(exponent)))

        if len(factors) == 2:
            prime, _ = factors[0]
            conjugate, _ = factors[1]
            if prime in conductor_primes or conjugate in conductor_primes:
                return [
                    (None if P in conductor_primes else phase(chi0.exponent(group.class_of(P))), 1)
                    for P in (prime, conjugate)
                ]
            exponent = chi0.exponent(group.class_of(prime))
            rational = chi0.exponent(rayclass_service.class_of_element(group, field.element(p)))
            return [(phase(exponent), 1), (phase(rational - exponent), 1)]

        prime, exponent = factors[0]
        if prime in conductor_primes:
            return [(None, 1)]
        degree = 2 if exponent == 1 else 1
        return [(phase(chi0.exponent(group.class_of(prime))), degree)]

    def _cesaro(self, partial: np.ndarray, n: int) -> complex:
        block = max(isqrt(n), 1)
        return complex(partial[n - block:n].mean())

    def l_value(self, chi0: Character, cutoff: int, ctx: PrecisionContext) -> LValue:
        """
        Smoothed L_f(1, chi_0) from an Euler-product sieve

        Coefficients a_n = sum over ideals of norm n of chi_0 are built in a
        complex128 array; the partial sums of a_n / n are averaged over the
        last sqrt(cutoff) norms. The error estimate is the distance to the
        same average at cutoff / 2.

        Args:
            chi0: Primitive nonprincipal character of Cl(f)
            cutoff: Largest ideal norm summed
            ctx: Precision context

        Returns:
            LValue
        """
        group = chi0.group
        if group.modulus.is_unit() or chi0.is_principal():
            raise OutOfScope("l_value needs a nonprincipal character of nontrivial conductor")
        if cutoff < 4:
            raise ValueError("cutoff must be at least 4")
        conductor_primes = {prime for prime, _ in quadfield_service.factor_ideal(group.modulus)}

        coefficients = np.ones(cutoff + 1, dtype=np.complex128)
        coefficients[0] = 0
        for p in primerange(2, cutoff + 1):
            local = self._local_coefficients(self._prime_values(chi0, p, conductor_primes), p, cutoff)
            if p * p > cutoff:
                coefficients[p::p] *= local[1]
                continue
            pk = p
            for k in range(1, len(local)):
                view = coefficients[pk::pk]
                view[np.arange(1, view.size + 1) % p != 0] *= local[k]
                pk *= p

        partial = np.cumsum(coefficients[1:] / np.arange(1, cutoff + 1))
        estimate = self._cesaro(partial, cutoff)
        error = abs(estimate - self._cesaro(partial, cutoff // 2))
        logger.info(f"L(1, {chi0}) ~ {estimate:.8g} (error {error:.2g}, cutoff {cutoff})")
        with ctx.workdps():
            return LValue(mpmath.mpc(estimate.real, estimate.imag), mpmath.mpf(error), cutoff)

    # Second limit formula

    def kronecker_rhs(
        self, chi: Character, gamma: FieldElement, ctx: PrecisionContext, workers: int = 1
    ) -> mpmath.mpc:
        """
        -pi chi_0([gamma d_K f]) / (3 N(f) sqrt|d_K| omega(f) T_gamma(chi_0 bar)) * S(chi_bar)

        Args:
            chi: Character of Cl(m) with nontrivial conductor f
            gamma: Element with gamma d_K f integral and prime to f
            ctx: Precision context
            workers: Worker processes for the invariant table

        Returns:
            mpc
        """
        group = chi.group
        field = group.field
        conductor = character_service.conductor(chi)
        chi0 = character_service.primitive_descent(chi)
        table = invariant_service.invariant_table(group, ctx, workers)
        s_bar = self.stickelberger(chi.conjugate(), table).value
        gauss = character_service.gauss_sum(gamma, chi0, ctx)
        twisted = Ideal.principal(gamma) * quadfield_service.different(field) * conductor
        with ctx.workdps():
            denominator = (
                3
                * quadfield_service.least_positive_integer(conductor)
                * mpmath.sqrt(abs(field.d))
                * quadfield_service.unit_count_mod(field, conductor)
                * gauss
            )
            return -mpmath.pi * chi0(chi0.group.class_of(twisted)) / denominator * s_bar

    def euler_factor(self, chi: Character) -> mpmath.mpc:
        """prod over P | m with P not dividing f_chi of (1 - chi_0 bar([P]))"""
        chi0 = character_service.primitive_descent(chi)
        conductor = character_service.conductor(chi)
        chi0_bar = chi0.conjugate()
        factor = mpmath.mpc(1)
        for prime, _ in quadfield_service.factor_ideal(chi.group.modulus):
            if prime.divides(conductor):
                continue
            factor *= 1 - chi0_bar(chi0.group.class_of(prime))
        return factor

    def kronecker_sides(
        self,
        chi: Character,
        cutoff: int,
        ctx: PrecisionContext,
        check_gamma: bool = True,
        workers: int = 1,
    ) -> KroneckerSides:
        """
        L-side and invariant side of the second limit formula

        Args:
            chi: Character of Cl(m) with f_chi != O_K
            cutoff: L-series cutoff
            ctx: Precision context
            check_gamma: Also evaluate the invariant side with a second gamma
            workers: Worker processes for the invariant table

        Returns:
            KroneckerSides
        """
        field = chi.group.field
        conductor = character_service.conductor(chi)
        if conductor.is_unit():
            raise OutOfScope("the limit formula needs a nontrivial conductor")
        chi0 = character_service.primitive_descent(chi)
        l_value = self.l_value(chi0, cutoff, ctx)

        gamma = character_service.choose_gamma(field, conductor)
        rhs = self.kronecker_rhs(chi, gamma, ctx, workers)
        spread = None
        if check_gamma:
            other = character_service.choose_gamma(field, conductor, skip=1)
            other_rhs = self.kronecker_rhs(chi, other, ctx, workers)
            with ctx.workdps():
                spread = abs(rhs - other_rhs) / abs(rhs)
            logger.debug(f"gamma = {gamma} and {other} give invariant sides {mpmath.nstr(spread, 5)} apart")

        with ctx.workdps():
            factor = self.euler_factor(chi)
            lhs = factor * l_value.value
        return KroneckerSides(lhs=lhs, rhs=rhs, l_value=l_value, euler_factor=factor, gamma_spread=spread)

    def kronecker_check(self, chi: Character, cutoff: int, ctx: PrecisionContext, workers: int = 1) -> mpmath.mpf:
        """Relative difference of the two sides of the second limit formula"""
        sides = self.kronecker_sides(chi, cutoff, ctx, check_gamma=False, workers=workers)
        residual = sides.residual
        log_check(
            f"kronecker d={chi.group.field.d} m={chi.group.modulus}",
            residual < mpmath.mpf(10) ** -3,
            f"residual={mpmath.nstr(residual, 5)} L-error={mpmath.nstr(sides.l_value.error, 3)}",
        )
        return residual


# Singleton instance
limitformula_service = LimitFormulaService()

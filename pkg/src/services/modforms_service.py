"""
Modular Forms Service
Arbitrary precision g2, g3, Delta, j, Weierstrass wp, Fricke, Siegel and
Weber functions with SL(2, Z) reduction
"""

from fractions import Fraction
from typing import Callable, Optional, Tuple, TypeVar
import math

import mpmath

from src.config.constants import EXCEPTIONAL_DISCRIMINANTS, FRICKE_SIEGEL_DENOMINATOR
from src.models.field import Field
from src.models.precision import HPoint, PrecisionContext, TorsionVector
from src.utils.exceptions import LatticePoint, OutOfScope, PrecisionExhausted
from src.utils.logger import setup_logger

logger = setup_logger()

Matrix = Tuple[Tuple[int, int], Tuple[int, int]]
IDENTITY: Matrix = ((1, 0), (0, 1))
T = TypeVar("T")


class _Unsettled(Exception):
    """Internal signal: the current precision cannot settle a comparison"""


def _mat_mul(left: Matrix, right: Matrix) -> Matrix:
    (a, b), (c, d) = left
    (e, f), (g, h) = right
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def _mat_inverse(m: Matrix) -> Matrix:
    (a, b), (c, d) = m
    return ((d, -b), (-c, a))


def _mpf(value: Fraction) -> mpmath.mpf:
    return mpmath.mpf(value.numerator) / value.denominator


def bernoulli2(x):
    """B_2(x) = x^2 - x + 1/6"""
    return x * x - x + mpmath.mpf(1) / 6


class ModFormsService:
    """Service for high precision evaluation of modular functions"""

    # Precision policy

    def with_escalation(self, compute: Callable[[PrecisionContext], T], ctx: PrecisionContext, what: str) -> T:
        """
        Run compute(ctx), doubling digits whenever it cannot settle

        Raises:
            PrecisionExhausted: After ctx.max_escalations retries
        """
        current = ctx
        for attempt in range(ctx.max_escalations + 1):
            try:
                return compute(current)
            except _Unsettled as exc:
                if attempt == ctx.max_escalations:
                    break
                logger.warning(f"{what}: {exc}; escalating to {2 * current.digits} digits")
                current = current.escalated()
        logger.error(f"{what}: precision exhausted at {current.digits} digits")
        raise PrecisionExhausted(f"{what} unsettled after {ctx.max_escalations} escalations")

    def _term_count(self, tau, dps: int, offset: int = 0) -> int:
        """Number of q-powers until |q|^n drops below 10^-(dps + 10)"""
        decay = 2 * mpmath.pi * mpmath.im(tau)
        return int(mpmath.ceil((dps + 10) * mpmath.log(10) / decay)) + offset + 2

    # Reduction

    def reduce_to_fundamental(
        self, tau: HPoint, v: Optional[TorsionVector] = None
    ) -> Tuple[HPoint, Optional[TorsionVector], Matrix]:
        """
        Move tau into |Re| <= 1/2, |tau| >= 1

        Args:
            tau: Point of the upper half-plane
            v: Optional torsion index carried along

        Returns:
            Tuple (tau', v', gamma) with tau' = gamma*tau and v' = v*gamma^-1,
            so that f_v(tau) = f_v'(tau')
        """
        z = mpmath.mpc(tau.tau)
        gamma = IDENTITY
        slack = mpmath.mpf(10) ** (-(mpmath.mp.dps // 2))
        for _ in range(10_000):
            n = int(mpmath.nint(mpmath.re(z)))
            if n:
                z -= n
                gamma = _mat_mul(((1, -n), (0, 1)), gamma)
            if abs(z) < 1 - slack:
                z = -1 / z
                gamma = _mat_mul(((0, -1), (1, 0)), gamma)
                continue
            break
        reduced_v = v.times(_mat_inverse(gamma)) if v is not None else None
        return HPoint(z), reduced_v, gamma

    def _automorphy(self, tau: HPoint, gamma: Matrix):
        (_, _), (c, d) = gamma
        return c * tau.tau + d

    # Eisenstein series

    def _series(self, tau, dps: int):
        """g2, g3 and the product Delta at a reduced point"""
        q = mpmath.exp(2j * mpmath.pi * tau)
        terms = self._term_count(tau, dps, offset=10)
        e4 = mpmath.mpf(0)
        e6 = mpmath.mpf(0)
        product = mpmath.mpf(1)
        qn = mpmath.mpf(1)
        for n in range(1, terms + 1):
            qn *= q
            lam = qn / (1 - qn)
            e4 += n ** 3 * lam
            e6 += n ** 5 * lam
            product *= (1 - qn) ** 24
        two_pi = 2 * mpmath.pi
        g2 = two_pi ** 4 / 12 * (1 + 240 * e4)
        g3 = two_pi ** 6 / 216 * (1 - 504 * e6)
        delta = two_pi ** 12 * q * product
        return g2, g3, delta

    def _checked_series(self, tau, ctx: PrecisionContext):
        with ctx.workdps():
            g2, g3, delta = self._series(tau, ctx.working_dps)
            scale = max(abs(g2) ** 3, 27 * abs(g3) ** 2, abs(delta))
            mismatch = abs(delta - (g2 ** 3 - 27 * g3 ** 2))
            if mismatch > scale * mpmath.mpf(10) ** (-ctx.digits):
                raise _Unsettled(f"Delta product and g2^3 - 27 g3^2 differ by {mpmath.nstr(mismatch / scale, 5)}")
            return g2, g3, delta

    def eisenstein_g2g3_delta_j(self, tau: HPoint, ctx: PrecisionContext):
        """
        g2, g3, Delta and j of the lattice [tau, 1]

        Args:
            tau: Point of the upper half-plane
            ctx: Precision context

        Returns:
            Tuple (g2, g3, Delta, j) with full (2 pi)-power normalization
        """
        def compute(current: PrecisionContext):
            with current.workdps():
                reduced, _, gamma = self.reduce_to_fundamental(tau)
                g2, g3, delta = self._checked_series(reduced.tau, current)
                lam = self._automorphy(tau, gamma)
                g2, g3, delta = g2 / lam ** 4, g3 / lam ** 6, delta / lam ** 12
                return g2, g3, delta, 1728 * g2 ** 3 / delta

        return self.with_escalation(compute, ctx, "eisenstein series")

    def j_invariant(self, tau: HPoint, ctx: PrecisionContext) -> mpmath.mpc:
        return self.eisenstein_g2g3_delta_j(tau, ctx)[3]

    def j_at_cm(self, field: Field, ctx: PrecisionContext) -> mpmath.mpc:
        """j(tau_K)"""
        with ctx.workdps():
            return self.j_invariant(HPoint(field.tau()), ctx)

    # Weierstrass functions

    def _translate(self, z, tau, ctx: PrecisionContext):
        """Move z into the period parallelogram centred at 0"""
        a = mpmath.im(z) / mpmath.im(tau)
        z = z - mpmath.nint(a) * tau
        z = z - mpmath.nint(mpmath.re(z))
        if abs(z) < ctx.lattice_tolerance:
            raise LatticePoint(f"z is within {mpmath.nstr(ctx.lattice_tolerance, 3)} of a lattice point")
        return z

    def _wp_series(self, z, tau, dps: int):
        two_pi_i = 2j * mpmath.pi
        q = mpmath.exp(two_pi_i * tau)
        u = mpmath.exp(two_pi_i * z)
        inv_u = 1 / u
        total = mpmath.mpf(1) / 12 + u / (1 - u) ** 2
        qn = mpmath.mpf(1)
        for _ in range(self._term_count(tau, dps, offset=1)):
            qn *= q
            x, y = qn * u, qn * inv_u
            total += x / (1 - x) ** 2 + y / (1 - y) ** 2 - 2 * qn / (1 - qn) ** 2
        return two_pi_i ** 2 * total

    def _wp_prime_series(self, z, tau, dps: int):
        two_pi_i = 2j * mpmath.pi
        q = mpmath.exp(two_pi_i * tau)
        u = mpmath.exp(two_pi_i * z)
        inv_u = 1 / u
        total = u * (1 + u) / (1 - u) ** 3
        qn = mpmath.mpf(1)
        for _ in range(self._term_count(tau, dps, offset=1)):
            qn *= q
            x, y = qn * u, qn * inv_u
            total += x * (1 + x) / (1 - x) ** 3 - y * (1 + y) / (1 - y) ** 3
        return two_pi_i ** 3 * total

    def wp(self, z, tau: HPoint, ctx: PrecisionContext) -> mpmath.mpc:
        """
        Weierstrass wp(z) of the lattice [tau, 1]

        Args:
            z: Complex argument off the lattice
            tau: Point of the upper half-plane
            ctx: Precision context

        Returns:
            mpc

        Raises:
            LatticePoint: If z is numerically a lattice point
        """
        with ctx.workdps():
            reduced, _, gamma = self.reduce_to_fundamental(tau)
            lam = self._automorphy(tau, gamma)
            w = self._translate(mpmath.mpc(z) / lam, reduced.tau, ctx)
            return self._wp_series(w, reduced.tau, ctx.working_dps) / lam ** 2

    def wp_prime(self, z, tau: HPoint, ctx: PrecisionContext) -> mpmath.mpc:
        """wp'(z) of the lattice [tau, 1] for tau already reduced"""
        with ctx.workdps():
            w = self._translate(mpmath.mpc(z), tau.tau, ctx)
            return self._wp_prime_series(w, tau.tau, ctx.working_dps)

    def wp_residual(self, z, tau: HPoint, ctx: PrecisionContext) -> mpmath.mpf:
        """|wp'^2 - (4 wp^3 - g2 wp - g3)| relative to |wp'^2|"""
        with ctx.workdps():
            g2, g3, _, _ = self.eisenstein_g2g3_delta_j(tau, ctx)
            p = self.wp(z, tau, ctx)
            dp = self.wp_prime(z, tau, ctx)
            return abs(dp ** 2 - (4 * p ** 3 - g2 * p - g3)) / max(abs(dp) ** 2, mpmath.mpf(1))

    # Fricke functions

    def _fricke_reduced(self, v: TorsionVector, tau, ctx: PrecisionContext):
        g2, g3, delta = self._checked_series(tau, ctx)
        z = _mpf(v.r1) * tau + _mpf(v.r2)
        w = self._translate(z, tau, ctx)
        return g2 * g3 / delta * self._wp_series(w, tau, ctx.working_dps)

    def fricke(self, v: TorsionVector, tau: HPoint, ctx: PrecisionContext) -> mpmath.mpc:
        """
        f_v(tau) = (g2 g3 / Delta)(tau) * wp(r1 tau + r2; [tau, 1])

        Args:
            v: Torsion index outside Z^2
            tau: Point of the upper half-plane
            ctx: Precision context

        Returns:
            Weight-zero value, depending only on +-v mod Z^2
        """
        if v.is_integral():
            raise LatticePoint(f"torsion index {v} is integral")

        def compute(current: PrecisionContext):
            with current.workdps():
                reduced, v_reduced, _ = self.reduce_to_fundamental(tau, v)
                return self._fricke_reduced(v_reduced.canonical(), reduced.tau, current)

        return self.with_escalation(compute, ctx, f"fricke {v}")

    def weber_h(self, field: Field, z, ctx: PrecisionContext) -> mpmath.mpc:
        """
        Weber function of O_K = [tau_K, 1]

        Args:
            field: Field
            z: Point of C off O_K
            ctx: Precision context

        Returns:
            (g2 g3/Delta) wp(z) in general, (g2^2/Delta) wp(z)^2 for d_K = -4
            and (g3/Delta) wp(z)^3 for d_K = -3
        """
        def compute(current: PrecisionContext):
            with current.workdps():
                tau_k = field.tau()
                shift = mpmath.nint(mpmath.re(tau_k))
                tau = tau_k - shift
                g2, g3, delta = self._checked_series(tau, current)
                p = self._wp_series(self._translate(mpmath.mpc(z), tau, current), tau, current.working_dps)
                if field.d == -4:
                    return g2 ** 2 / delta * p ** 2
                if field.d == -3:
                    return g3 / delta * p ** 3
                return g2 * g3 / delta * p

        return self.with_escalation(compute, ctx, f"weber h on d={field.d}")

    def weber_at_fraction(self, field: Field, t: int, N: int, ctx: PrecisionContext) -> mpmath.mpc:
        """h(t/N)"""
        with ctx.workdps():
            return self.weber_h(field, mpmath.mpf(t) / N, ctx)

    # Siegel functions

    def _siegel_factors(self, v: TorsionVector, tau):
        """Prefactor, first factor and the q-product factors of g_v, r1 in [0, 1)"""
        r1, r2 = _mpf(v.r1), _mpf(v.r2)
        two_pi_i = 2j * mpmath.pi
        q = mpmath.exp(two_pi_i * tau)
        qz = mpmath.exp(two_pi_i * (r1 * tau + r2))
        factors = [1 - qz]
        qn = mpmath.mpf(1)
        for _ in range(self._term_count(tau, mpmath.mp.dps, offset=1)):
            qn *= q
            factors.append(1 - qn * qz)
            factors.append(1 - qn / qz)
        return r1, r2, factors

    def siegel(self, v: TorsionVector, tau, ctx: PrecisionContext) -> mpmath.mpc:
        """
        Raw Siegel product g_v(tau) for the exact index v

        g = -e^{pi i r2 (r1 - 1)} q^{B2(r1)/2} (1 - q^r1 w) prod (1 - q^(n+r1) w)(1 - q^(n-r1)/w);
        indices with r1 outside [0, 1) go through g_{(r1+k, r2)} = (-e^{-pi i r2})^k g_{(r1, r2)}.
        """
        if v.is_integral():
            raise LatticePoint(f"torsion index {v} is integral")
        with ctx.workdps():
            shift = math.floor(v.r1)
            base = TorsionVector(v.r1 - shift, v.r2)
            r1, r2, factors = self._siegel_factors(base, tau)
            value = -mpmath.expjpi(r2 * (r1 - 1)) * mpmath.exp(1j * mpmath.pi * tau * bernoulli2(r1))
            for factor in factors:
                value *= factor
            return value * (-mpmath.expjpi(-r2)) ** shift

    def log_abs_siegel(self, v: TorsionVector, tau: HPoint, ctx: PrecisionContext) -> mpmath.mpf:
        """ln|g_v(tau)|, invariant under SL(2, Z) index transport and v -> v + Z^2"""
        if v.is_integral():
            raise LatticePoint(f"torsion index {v} is integral")
        with ctx.workdps():
            reduced, v_reduced, _ = self.reduce_to_fundamental(tau, v)
            r1, _, factors = self._siegel_factors(v_reduced.reduced(), reduced.tau)
            total = -mpmath.pi * mpmath.im(reduced.tau) * bernoulli2(r1)
            for factor in factors:
                total += mpmath.log(abs(factor))
            return total

    def siegel_pow(self, v: TorsionVector, tau: HPoint, k: int, ctx: PrecisionContext) -> mpmath.mpc:
        """
        g_v(tau)^k for a multiple k of 12N

        Args:
            v: Torsion index with N*v integral
            tau: Point of the upper half-plane
            k: Positive multiple of 12 * level(v)
            ctx: Precision context

        Returns:
            mpc, depending only on +-v mod Z^2
        """
        if k <= 0 or k % (12 * v.level):
            raise ValueError(f"exponent {k} is not a positive multiple of {12 * v.level}")
        with ctx.workdps():
            reduced, v_reduced, _ = self.reduce_to_fundamental(tau, v)
            return self.siegel(v_reduced.reduced(), reduced.tau, ctx) ** k

    # Fricke-Siegel identity

    def fricke_siegel_residual(self, u: TorsionVector, v: TorsionVector, tau: HPoint, ctx: PrecisionContext) -> mpmath.mpf:
        """
        Relative residual of
            (f_u - f_v)^6 = j^2 (j - 1728)^3 / (2^30 3^24) * g_{u+v}^6 g_{u-v}^6 / (g_u^12 g_v^12)

        Args:
            u, v: Torsion indices with u not congruent to +-v mod Z^2
            tau: Point of the upper half-plane (Siegel products are taken at tau itself)
            ctx: Precision context

        Returns:
            Nonnegative mpf
        """
        if (u + (-v)).is_integral() or (u + v).is_integral():
            raise OutOfScope(f"{u} is congruent to +-{v} modulo Z^2")
        with ctx.workdps():
            left = (self.fricke(u, tau, ctx) - self.fricke(v, tau, ctx)) ** 6
            j = self.j_invariant(tau, ctx)

            def g(w: TorsionVector):
                return self.siegel(w, tau.tau, ctx)

            right = (
                j ** 2 * (j - 1728) ** 3 / FRICKE_SIEGEL_DENOMINATOR
                * g(u + v) ** 6 * g(u + (-v)) ** 6
                / (g(u) ** 12 * g(v) ** 12)
            )
            return abs(left - right) / max(abs(left), abs(right))

    def is_exceptional(self, field: Field) -> bool:
        return field.d in EXCEPTIONAL_DISCRIMINANTS


# Singleton instance
modforms_service = ModFormsService()

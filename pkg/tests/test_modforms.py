"""
Modular Forms Tests
Tests for j, wp, Fricke, Siegel and Weber functions
"""

import sys
import os

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest
import mpmath

from src.models.precision import HPoint, PrecisionContext, TorsionVector
from src.services.modforms_service import _Unsettled, modforms_service
from src.services.quadfield_service import quadfield_service
from src.utils.exceptions import LatticePoint, OutOfScope, PrecisionExhausted


@pytest.fixture
def ctx():
    return PrecisionContext(digits=30, guard=10)


@pytest.fixture
def tau():
    """A reduced point away from the elliptic points"""
    with mpmath.workdps(50):
        return HPoint(mpmath.mpc("0.1", "1.2"))


def close(a, b, digits=20):
    """Relative agreement to the given number of digits"""
    with mpmath.workdps(60):
        return abs(a - b) <= mpmath.mpf(10) ** -digits * max(abs(a), abs(b), 1)


class TestJInvariant:
    """Test j at classical CM points and its modularity"""

    @pytest.mark.parametrize("d, value", [(-4, 1728), (-7, -3375), (-8, 8000), (-11, -32768), (-163, -640320 ** 3)])
    def test_class_number_one_values(self, ctx, d, value):
        field = quadfield_service.make_field(d)
        j = modforms_service.j_at_cm(field, ctx)
        assert close(j, value)

    def test_j_at_rho_is_zero(self, ctx):
        field = quadfield_service.make_field(-3)
        with ctx.workdps():
            assert abs(modforms_service.j_at_cm(field, ctx)) < mpmath.mpf(10) ** -15

    def test_j_d20(self, ctx):
        """j(sqrt(-5)) = 632000 + 282880 sqrt(5)"""
        field = quadfield_service.make_field(-20)
        j = modforms_service.j_at_cm(field, ctx)
        with ctx.workdps():
            expected = 632000 + 282880 * mpmath.sqrt(5)
        assert close(j, expected)

    def test_modular_invariance(self, ctx):
        with ctx.workdps():
            z = mpmath.mpc("0.3", "0.8")
            values = [
                modforms_service.j_invariant(HPoint(z), ctx),
                modforms_service.j_invariant(HPoint(z + 1), ctx),
                modforms_service.j_invariant(HPoint(-1 / z), ctx),
            ]
        assert close(values[0], values[1])
        assert close(values[0], values[2])

    def test_discriminant_identity(self, tau, ctx):
        g2, g3, delta, j = modforms_service.eisenstein_g2g3_delta_j(tau, ctx)
        assert close(delta, g2 ** 3 - 27 * g3 ** 2)
        assert close(j, 1728 * g2 ** 3 / delta)

    def test_reduce_to_fundamental(self):
        with mpmath.workdps(40):
            reduced, v, gamma = modforms_service.reduce_to_fundamental(
                HPoint(mpmath.mpc("3.4", "0.05")), TorsionVector.of("1/5", "2/5")
            )
            assert abs(mpmath.re(reduced.tau)) <= mpmath.mpf("0.5") + mpmath.mpf(10) ** -30
            assert abs(reduced.tau) >= 1 - mpmath.mpf(10) ** -15
        (a, b), (c, d) = gamma
        assert a * d - b * c == 1
        assert v.level == 5


class TestWeierstrass:
    """Test wp and the differential equation"""

    def test_differential_equation(self, tau, ctx):
        with ctx.workdps():
            z = mpmath.mpc("0.3", "0.2")
        assert modforms_service.wp_residual(z, tau, ctx) < mpmath.mpf(10) ** -20

    def test_wp_is_even_and_periodic(self, tau, ctx):
        with ctx.workdps():
            z = mpmath.mpc("0.27", "0.31")
            value = modforms_service.wp(z, tau, ctx)
            assert close(value, modforms_service.wp(-z, tau, ctx))
            assert close(value, modforms_service.wp(z + 1, tau, ctx))
            assert close(value, modforms_service.wp(z + tau.tau, tau, ctx))

    def test_lattice_point_rejected(self, tau, ctx):
        with pytest.raises(LatticePoint):
            modforms_service.wp(1, tau, ctx)

    def test_upper_half_plane_required(self):
        with pytest.raises(ValueError):
            HPoint(mpmath.mpc(0, -1))


class TestFricke:
    """Test Fricke functions"""

    def test_sign_and_translation_invariance(self, tau, ctx):
        v = TorsionVector.of("1/5", "2/5")
        value = modforms_service.fricke(v, tau, ctx)
        assert close(value, modforms_service.fricke(-v, tau, ctx))
        assert close(value, modforms_service.fricke(v + TorsionVector.of(1, -2), tau, ctx))

    def test_translation_of_tau(self, tau, ctx):
        """f_(r1, r2)(tau + 1) = f_(r1, r1 + r2)(tau)"""
        v = TorsionVector.of("1/7", "3/7")
        with ctx.workdps():
            shifted = HPoint(tau.tau + 1)
        left = modforms_service.fricke(v, shifted, ctx)
        right = modforms_service.fricke(TorsionVector(v.r1, v.r1 + v.r2), tau, ctx)
        assert close(left, right)

    def test_integral_index_rejected(self, tau, ctx):
        with pytest.raises(LatticePoint):
            modforms_service.fricke(TorsionVector.of(1, 0), tau, ctx)

    def test_weber_equals_fricke_at_cm_point(self, ctx):
        field = quadfield_service.make_field(-20)
        weber = modforms_service.weber_at_fraction(field, 2, 7, ctx)
        with ctx.workdps():
            tau_k = HPoint(field.tau())
        fricke = modforms_service.fricke(TorsionVector.of(0, "2/7"), tau_k, ctx)
        assert close(weber, fricke)

    def test_weber_symmetry(self, ctx):
        field = quadfield_service.make_field(-23)
        value = modforms_service.weber_at_fraction(field, 2, 7, ctx)
        assert close(value, modforms_service.weber_at_fraction(field, 5, 7, ctx))
        assert close(value, modforms_service.weber_at_fraction(field, -2, 7, ctx))

    @pytest.mark.parametrize("d", [-3, -4])
    def test_exceptional_fields(self, d):
        assert modforms_service.is_exceptional(quadfield_service.make_field(d))

    def test_exceptional_weber_is_finite(self, ctx):
        field = quadfield_service.make_field(-4)
        value = modforms_service.weber_at_fraction(field, 1, 5, ctx)
        with ctx.workdps():
            assert mpmath.isfinite(value.real) and mpmath.isfinite(value.imag)


class TestSiegel:
    """Test Siegel functions and the Fricke-Siegel identity"""

    def test_log_abs_matches_product(self, tau, ctx):
        v = TorsionVector.of("1/5", "2/5")
        with ctx.workdps():
            raw = mpmath.log(abs(modforms_service.siegel(v, tau.tau, ctx)))
        assert close(raw, modforms_service.log_abs_siegel(v, tau, ctx))

    def test_log_abs_index_invariance(self, tau, ctx):
        v = TorsionVector.of("2/9", "4/9")
        value = modforms_service.log_abs_siegel(v, tau, ctx)
        assert close(value, modforms_service.log_abs_siegel(-v, tau, ctx))
        assert close(value, modforms_service.log_abs_siegel(v + TorsionVector.of(3, 1), tau, ctx))

    def test_siegel_power_depends_on_class(self, tau, ctx):
        v = TorsionVector.of("1/5", "2/5")
        value = modforms_service.siegel_pow(v, tau, 60, ctx)
        assert close(value, modforms_service.siegel_pow(v + TorsionVector.of(1, 0), tau, 60, ctx), 15)
        assert close(value, modforms_service.siegel_pow(-v, tau, 60, ctx), 15)

    def test_siegel_power_exponent(self, tau, ctx):
        with pytest.raises(ValueError):
            modforms_service.siegel_pow(TorsionVector.of("1/5", 0), tau, 12, ctx)

    @pytest.mark.parametrize("u, v", [
        (("1/5", 0), (0, "1/3")),
        (("1/4", "1/2"), ("1/6", "1/12")),
        (("2/7", "1/7"), ("1/2", "1/3")),
    ])
    def test_fricke_siegel_identity(self, tau, ctx, u, v):
        residual = modforms_service.fricke_siegel_residual(TorsionVector.of(*u), TorsionVector.of(*v), tau, ctx)
        assert residual < ctx.identity_tolerance

    def test_identity_needs_distinct_classes(self, tau, ctx):
        v = TorsionVector.of("1/5", "1/5")
        with pytest.raises(OutOfScope):
            modforms_service.fricke_siegel_residual(v, -v, tau, ctx)


class TestPrecisionPolicy:
    """Test escalation and the thresholds"""

    def test_escalation_exhausted(self):
        ctx = PrecisionContext(digits=30, guard=10, max_escalations=2)
        seen = []

        def compute(current):
            seen.append(current.digits)
            raise _Unsettled("never settles")

        with pytest.raises(PrecisionExhausted):
            modforms_service.with_escalation(compute, ctx, "test")
        assert seen == [30, 60, 120]

    def test_escalation_settles(self):
        ctx = PrecisionContext(digits=30, guard=10, max_escalations=3)

        def compute(current):
            if current.digits < 60:
                raise _Unsettled("too coarse")
            return current.digits

        assert modforms_service.with_escalation(compute, ctx, "test") == 60

    def test_thresholds_ordered(self):
        ctx = PrecisionContext(digits=40, guard=10)
        assert ctx.equal_threshold < ctx.distinct_threshold
        assert ctx.working_dps == 50

    def test_digits_bound(self):
        with pytest.raises(ValueError):
            PrecisionContext(digits=10, guard=10)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

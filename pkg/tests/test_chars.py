"""
Character Tests
Tests for dual groups, conductors, Gauss sums and the character searches
"""

import sys
import os

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest
import mpmath

from src.models.ideal import Ideal
from src.models.precision import PrecisionContext
from src.models.rayclass import Subgroup
from src.services.character_service import character_service
from src.services.quadfield_service import quadfield_service
from src.services.rayclass_service import rayclass_service
from src.utils.exceptions import AlreadyImpossible, ConductorUndefined, NoTwistExists, OutOfScope


@pytest.fixture
def field20():
    return quadfield_service.make_field(-20)


@pytest.fixture
def group5(field20):
    return rayclass_service.rational_group(field20, 5)


@pytest.fixture
def group12(field20):
    return rayclass_service.rational_group(field20, 12)


@pytest.fixture
def ctx():
    return PrecisionContext(digits=30, guard=10)


@pytest.fixture
def primitive5(group5):
    """First character of Cl(5) with conductor (5)"""
    return next(
        chi for chi in character_service.iter_dual_group(group5)
        if character_service.conductor(chi) == group5.modulus
    )


class TestDualGroup:
    """Test enumeration and orthogonality"""

    def test_dual_group_size(self, group5):
        assert len(character_service.dual_group(group5)) == group5.order

    def test_orthogonality(self, group5):
        for chi in character_service.iter_dual_group(group5):
            expected = group5.order if chi.is_principal() else 0
            assert character_service.character_sum(chi) == expected

    def test_character_is_homomorphism(self, group12):
        chi = character_service.dual_group(group12)[5]
        classes = group12.classes
        for a in classes[:6]:
            for b in classes[:6]:
                assert chi.exponent(a * b) == (chi.exponent(a) + chi.exponent(b)) % 1

    def test_conjugate_inverts(self, group5):
        chi = character_service.dual_group(group5)[7]
        assert (chi * chi.conjugate()).is_principal()

    def test_values_are_roots_of_unity(self, group5, ctx):
        chi = character_service.dual_group(group5)[3]
        with ctx.workdps():
            for c in group5.classes:
                assert abs(abs(chi(c)) - 1) < mpmath.mpf(10) ** -25


class TestConductors:
    """Test the conductor scan and primitive descent"""

    def test_principal_conductor(self, group5, field20):
        principal = character_service.principal(group5)
        assert character_service.conductor(principal) == Ideal.unit(field20)

    def test_class_group_character_is_unramified(self, field20, group5):
        class_group = rayclass_service.class_group(field20)
        rho = next(chi for chi in character_service.iter_dual_group(class_group) if not chi.is_principal())
        lifted = character_service.pullback(rho, group5)
        assert not lifted.is_principal()
        assert character_service.conductor(lifted) == Ideal.unit(field20)

    def test_conductor_divides_modulus(self, group12):
        for chi in character_service.dual_group(group12)[:16]:
            assert character_service.conductor(chi).divides(group12.modulus)

    def test_primitive_descent_is_idempotent(self, group12):
        for chi in character_service.dual_group(group12)[:16]:
            chi0 = character_service.primitive_descent(chi)
            assert chi0.group.modulus == character_service.conductor(chi)
            assert character_service.primitive_descent(chi0) == chi0

    def test_descent_agrees_with_character(self, group12):
        chi = character_service.dual_group(group12)[9]
        chi0 = character_service.primitive_descent(chi)
        for c in group12.classes:
            image = rayclass_service.project(group12, chi0.group, c)
            assert chi.exponent(c) == chi0.exponent(image)

    def test_conductor_support(self, primitive5, field20):
        p5 = quadfield_service.factor_rational_prime(field20, 5)[0][0]
        assert character_service.conductor_support(primitive5) == [p5]

    def test_incomparable_candidates_raise(self, group12, monkeypatch):
        """(2) and (3) both qualifying leaves no least divisor"""
        monkeypatch.setattr(character_service, "_conductors", {})
        monkeypatch.setattr(character_service, "trivial_on_kernel", lambda chi, target: target.norm() in (4, 9))
        with pytest.raises(ConductorUndefined):
            character_service.conductor(character_service.dual_group(group12)[1])


class TestGaussSums:
    """Test the gamma search and Gauss sums"""

    def test_choose_gamma_is_valid(self, field20):
        conductor = Ideal.rational(field20, 5)
        gamma = character_service.choose_gamma(field20, conductor)
        assert character_service.is_valid_gamma(gamma, conductor)

    def test_second_gamma_differs(self, field20):
        conductor = Ideal.rational(field20, 5)
        first = character_service.choose_gamma(field20, conductor)
        second = character_service.choose_gamma(field20, conductor, skip=1)
        assert first != second
        assert character_service.is_valid_gamma(second, conductor)

    def test_choose_gamma_needs_conductor(self, field20):
        with pytest.raises(OutOfScope):
            character_service.choose_gamma(field20, Ideal.unit(field20))

    def test_gauss_sum_absolute_value(self, field20, primitive5, ctx):
        """|T| = sqrt(N(f)) for a primitive character"""
        gamma = character_service.choose_gamma(field20, primitive5.group.modulus)
        value = character_service.gauss_sum(gamma, primitive5, ctx)
        with ctx.workdps():
            assert abs(abs(value) ** 2 - 25) < mpmath.mpf(10) ** -20


class TestSearchedCharacters:
    """Test the character constructions used by the case analysis"""

    def test_find_char_A(self, group5):
        hilbert = rayclass_service.subgroup_hilbert(group5)
        ring = rayclass_service.subgroup_ring(group5)
        target = next(c for c in group5.classes if hilbert.contains(c) and not ring.contains(c))
        chi = character_service.find_char_A(group5, target)
        assert chi.is_trivial_on(ring)
        assert not chi.is_one_at(target)
        for prime, _ in quadfield_service.factor_ideal(group5.modulus):
            assert character_service.prime_divides_conductor(chi, prime)

    def test_find_char_A_scope(self, group12):
        with pytest.raises(OutOfScope):
            character_service.find_char_A(group12, group12.identity)

    def test_find_char_A_target_in_ring_subgroup(self, group5):
        with pytest.raises(OutOfScope):
            character_service.find_char_A(group5, group5.identity)

    def test_find_char_A_target_outside_hilbert_subgroup(self, group5):
        hilbert = rayclass_service.subgroup_hilbert(group5)
        target = next(c for c in group5.classes if not hilbert.contains(c))
        with pytest.raises(OutOfScope):
            character_service.find_char_A(group5, target)

    def test_product_of_local_characters(self, group12):
        chi = character_service.product_of_local_characters(group12)
        support = character_service.conductor_support(chi)
        primes = [prime for prime, _ in quadfield_service.factor_ideal(group12.modulus)]
        assert support == primes

    def test_find_char_p_split_two_excluded(self):
        field = quadfield_service.make_field(-23)
        group = rayclass_service.rational_group(field, 10)
        with pytest.raises(OutOfScope):
            character_service.find_char_p(group, 2, 1)

    def test_find_char_p_needs_exact_power(self, group12):
        with pytest.raises(OutOfScope):
            character_service.find_char_p(group12, 2, 1)


class TestTwists:
    """Test twisting by class group characters"""

    def test_trivial_subgroup(self, group5):
        trivial = Subgroup(group5, frozenset({group5.identity.vector}))
        with pytest.raises(AlreadyImpossible):
            character_service.twist_nontrivial_on(character_service.principal(group5), trivial)

    def test_nontrivial_character_kept(self, group5, primitive5):
        whole = Subgroup(group5, frozenset(c.vector for c in group5.classes))
        assert character_service.twist_nontrivial_on(primitive5, whole) == primitive5

    def test_twist_found(self, group5):
        whole = Subgroup(group5, frozenset(c.vector for c in group5.classes))
        twisted = character_service.twist_nontrivial_on(character_service.principal(group5), whole)
        assert not twisted.is_trivial_on(whole)

    def test_no_twist_on_hilbert_subgroup(self, group5):
        hilbert = rayclass_service.subgroup_hilbert(group5)
        with pytest.raises(NoTwistExists):
            character_service.twist_nontrivial_on(character_service.principal(group5), hilbert)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

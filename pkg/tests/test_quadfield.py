"""
Quadratic Field Tests
Tests for fields, prime splitting, ideal arithmetic and reduced forms
"""

import sys
import os

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest
from fractions import Fraction

from sympy import primerange

from src.models.ideal import Ideal
from src.services.quadfield_service import is_fundamental, quadfield_service
from src.utils.exceptions import NotFundamental, NotImaginary, NotIntegral, ZeroIdeal


@pytest.fixture
def field20():
    """Q(sqrt(-5)), class number 2"""
    return quadfield_service.make_field(-20)


@pytest.fixture
def field23():
    return quadfield_service.make_field(-23)


class TestFields:
    """Test field construction"""

    @pytest.mark.parametrize("d", [-3, -4, -7, -8, -15, -20, -23, -31, -163])
    def test_fundamental_discriminants(self, d):
        """Fundamental discriminants are accepted"""
        assert is_fundamental(d)
        assert quadfield_service.make_field(d).d == d

    def test_positive_discriminant_rejected(self):
        with pytest.raises(NotImaginary):
            quadfield_service.make_field(5)

    @pytest.mark.parametrize("d", [-12, -16, -36, -1])
    def test_non_fundamental_rejected(self, d):
        with pytest.raises(NotFundamental):
            quadfield_service.make_field(d)

    @pytest.mark.parametrize("d, count", [(-3, 6), (-4, 4), (-20, 2), (-23, 2)])
    def test_unit_count(self, d, count):
        field = quadfield_service.make_field(d)
        assert field.unit_count == count
        assert len(field.units()) == count

    def test_units_are_roots_of_unity(self):
        """Every unit has norm 1 and the generator has the full order"""
        for d in (-3, -4):
            field = quadfield_service.make_field(d)
            units = field.units()
            assert all(u.norm() == 1 for u in units)
            assert len({(u.x, u.y) for u in units}) == field.unit_count

    def test_tau_minimal_polynomial(self, field20):
        """tau^2 = d*tau - n"""
        tau = field20.tau_element
        assert tau * tau == field20.element(-field20.n, field20.d)


class TestPrimeSplitting:
    """Test factorization of rational primes"""

    @pytest.mark.parametrize("p, symbol", [(2, 0), (3, 1), (5, 0), (7, 1), (11, -1), (13, -1)])
    def test_kronecker_symbol(self, p, symbol):
        assert quadfield_service.kronecker_symbol(-20, p) == symbol

    @pytest.mark.parametrize("d", [-3, -4, -7, -8, -20, -23, -31, -163])
    def test_kronecker_symbol_matches_residues(self, d):
        """Compare against squares mod p for every p < 200"""
        for p in primerange(2, 200):
            if d % p == 0:
                expected = 0
            elif p == 2:
                expected = 1 if d % 8 in (1, 7) else -1
            else:
                squares = {x * x % p for x in range(1, p)}
                expected = 1 if d % p in squares else -1
            assert quadfield_service.kronecker_symbol(d, p) == expected, f"p={p}"

    def test_kronecker_at_two(self):
        """2 splits iff d = 1 mod 8"""
        assert quadfield_service.kronecker_symbol(-23, 2) == 1
        assert quadfield_service.kronecker_symbol(-31, 2) == 1
        assert quadfield_service.kronecker_symbol(-3, 2) == -1

    def test_ramified_prime(self, field20):
        factors = quadfield_service.factor_rational_prime(field20, 5)
        assert len(factors) == 1
        prime, e = factors[0]
        assert e == 2
        assert prime.norm() == 5
        assert prime ** 2 == Ideal.rational(field20, 5)

    def test_split_prime(self, field20):
        factors = quadfield_service.factor_rational_prime(field20, 3)
        assert [e for _, e in factors] == [1, 1]
        p, q = (prime for prime, _ in factors)
        assert p != q
        assert p.conjugate() == q
        assert p * q == Ideal.rational(field20, 3)

    def test_inert_prime(self, field20):
        factors = quadfield_service.factor_rational_prime(field20, 11)
        assert factors == [(Ideal.rational(field20, 11), 1)]
        assert factors[0][0].norm() == 121

    def test_factor_ideal_of_rational_modulus(self, field20):
        factors = quadfield_service.factor_ideal(Ideal.rational(field20, 12))
        norms = sorted((int(prime.norm()), e) for prime, e in factors)
        # (12) = p2^4 * p3 * p3'
        assert norms == [(2, 4), (3, 1), (3, 1)]


class TestIdealArithmetic:
    """Test products, inverses, norms and coprimality"""

    def test_inverse(self, field20):
        prime, _ = quadfield_service.factor_rational_prime(field20, 7)[0]
        assert prime * quadfield_service.ideal_inverse(prime) == Ideal.unit(field20)

    def test_norm_is_multiplicative(self, field20):
        p = quadfield_service.factor_rational_prime(field20, 3)[0][0]
        q = quadfield_service.factor_rational_prime(field20, 7)[1][0]
        assert quadfield_service.ideal_norm(p * q) == p.norm() * q.norm()

    def test_zero_ideal_rejected(self, field20):
        zero = Ideal(field20, 0, 0, 0)
        with pytest.raises(ZeroIdeal):
            quadfield_service.ideal_norm(zero)

    def test_coprimality(self, field20):
        p3 = quadfield_service.factor_rational_prime(field20, 3)[0][0]
        assert quadfield_service.is_coprime(p3, Ideal.rational(field20, 5))
        assert not quadfield_service.is_coprime(p3, Ideal.rational(field20, 6))

    def test_least_positive_integer(self, field20):
        p5 = quadfield_service.factor_rational_prime(field20, 5)[0][0]
        assert quadfield_service.least_positive_integer(p5) == 5
        assert quadfield_service.least_positive_integer(Ideal.rational(field20, 12)) == 12

    def test_least_positive_integer_needs_integral_ideal(self, field20):
        p5 = quadfield_service.factor_rational_prime(field20, 5)[0][0]
        with pytest.raises(NotIntegral):
            quadfield_service.least_positive_integer(p5.inverse())

    def test_different(self, field20):
        assert quadfield_service.different(field20).norm() == 20

    def test_phi(self, field20):
        assert quadfield_service.phi(Ideal.rational(field20, 5)) == 20
        assert quadfield_service.phi(Ideal.rational(field20, 7)) == 36
        assert quadfield_service.phi(Ideal.rational(field20, 11)) == 120

    def test_unit_residues_count_phi(self, field20):
        modulus = Ideal.rational(field20, 6)
        assert len(quadfield_service.unit_residues(modulus)) == quadfield_service.phi(modulus)

    def test_unit_count_mod(self, field20):
        assert quadfield_service.unit_count_mod(field20, Ideal.rational(field20, 2)) == 2
        assert quadfield_service.unit_count_mod(field20, Ideal.rational(field20, 5)) == 1


class TestPrincipality:
    """Test the principal generator search"""

    def test_rational_ideal_is_principal(self, field20):
        generator = quadfield_service.is_principal_with_generator(Ideal.rational(field20, 6))
        assert generator is not None
        assert generator.norm() == 36

    def test_non_principal_primes(self, field20):
        """No element of Z[sqrt(-5)] has norm 2 or 3"""
        for p in (2, 3):
            prime = quadfield_service.factor_rational_prime(field20, p)[0][0]
            assert quadfield_service.is_principal_with_generator(prime) is None

    def test_product_of_nonprincipal_is_principal(self, field20):
        p2 = quadfield_service.factor_rational_prime(field20, 2)[0][0]
        p3 = quadfield_service.factor_rational_prime(field20, 3)[0][0]
        generator = quadfield_service.is_principal_with_generator(p2 * p3)
        assert generator is not None
        assert generator.norm() == 6
        assert Ideal.principal(generator) == p2 * p3


class TestEnumeration:
    """Test ideal enumeration by norm"""

    def test_ideals_of_norm(self, field20):
        # 6 = 2 * 3 with 2 ramified and 3 split
        assert len(quadfield_service.ideals_of_norm(field20, 6)) == 2
        assert len(quadfield_service.ideals_of_norm(field20, 9)) == 3

    def test_enumeration_ordered_and_coprime(self, field20):
        modulus = Ideal.rational(field20, 5)
        ideals = list(quadfield_service.enumerate_integral_ideals(field20, 30, coprime_to=modulus))
        norms = [ideal.norm() for ideal in ideals]
        assert norms == sorted(norms)
        assert all(quadfield_service.is_coprime(ideal, modulus) for ideal in ideals)
        assert len(set(ideals)) == len(ideals)


class TestForms:
    """Test reduced binary quadratic forms"""

    @pytest.mark.parametrize("d, h", [(-3, 1), (-4, 1), (-20, 2), (-23, 3), (-31, 3), (-56, 4), (-163, 1)])
    def test_class_numbers(self, d, h):
        assert quadfield_service.class_number(quadfield_service.make_field(d)) == h

    def test_reduced_forms_d20(self):
        assert quadfield_service.reduced_forms(-20) == ((1, 0, 5), (2, 2, 3))

    def test_form_of_ideal_round_trip(self, field23):
        for form in quadfield_service.reduced_forms(-23):
            ideal = quadfield_service.ideal_of_form(field23, form)
            assert quadfield_service.form_of_ideal(ideal) == form

    def test_reduce_form(self):
        a, b, c = quadfield_service.reduce_form(5, 12, 8)
        assert b * b - 4 * a * c == 144 - 160
        assert abs(b) <= a <= c

    def test_norm_fraction(self, field20):
        ideal = Ideal.rational(field20, 3).inverse()
        assert ideal.norm() == Fraction(1, 9)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

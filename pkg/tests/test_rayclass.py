"""
Ray Class Tests
Tests for ray class groups, distinguished classes and subgroup towers
"""

import sys
import os

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from src.config.settings import settings
from src.models.ideal import Ideal
from src.models.rayclass import Subgroup
from src.services.quadfield_service import quadfield_service
from src.services.rayclass_service import rayclass_service
from src.utils.exceptions import NotCoprime, NotDivisor, SearchExhausted


@pytest.fixture
def field20():
    return quadfield_service.make_field(-20)


@pytest.fixture
def group5(field20):
    """Cl(5) over Q(sqrt(-5))"""
    return rayclass_service.rational_group(field20, 5)


@pytest.fixture
def group7(field20):
    return rayclass_service.rational_group(field20, 7)


class TestGroupOrders:
    """Test the order formula against the enumerated groups"""

    @pytest.mark.parametrize("d, h", [(-20, 2), (-23, 3), (-3, 1), (-4, 1)])
    def test_class_group(self, d, h):
        field = quadfield_service.make_field(d)
        assert rayclass_service.class_group(field).order == h

    @pytest.mark.parametrize("N, order", [(5, 20), (7, 36), (8, 32), (9, 36), (12, 32)])
    def test_ray_class_orders_d20(self, field20, N, order):
        group = rayclass_service.rational_group(field20, N)
        assert group.order == order
        assert group.order == rayclass_service.expected_order(field20, group.modulus)

    @pytest.mark.parametrize("d", [-3, -4, -23, -31])
    @pytest.mark.parametrize("N", [2, 5, 6, 10])
    def test_order_formula(self, d, N):
        field = quadfield_service.make_field(d)
        modulus = Ideal.rational(field, N)
        assert rayclass_service.ray_class_group(field, modulus).order == rayclass_service.expected_order(field, modulus)

    def test_snf_divisibility(self, group7):
        snf = group7.snf
        assert all(snf[i + 1] % snf[i] == 0 for i in range(len(snf) - 1))
        assert all(d > 1 for d in snf)

    def test_prime_modulus(self, field20):
        p3 = quadfield_service.factor_rational_prime(field20, 3)[0][0]
        group = rayclass_service.ray_class_group(field20, p3)
        # h * (3 - 1) * 1 / 2
        assert group.order == 2


class TestDiscreteLog:
    """Test class_of and representatives"""

    def test_generators_have_their_basis_classes(self, group7):
        """Each class log is consistent with the group law"""
        for g in group7.generators:
            ray_class = rayclass_service.class_of(group7, g)
            assert ray_class.group is group7

    def test_log_is_multiplicative(self, field20, group7):
        primes = [p for p in quadfield_service.prime_ideals_up_to(field20, 30)
                  if quadfield_service.is_coprime(p, group7.modulus)]
        for a in primes[:4]:
            for b in primes[:4]:
                assert group7.class_of(a * b) == group7.class_of(a) * group7.class_of(b)

    def test_log_is_multiplicative_on_random_pairs(self, field20, group7):
        """100 seeded pairs of ideals coprime to (7)"""
        ideals = list(quadfield_service.enumerate_integral_ideals(field20, 80, coprime_to=group7.modulus))
        rng = np.random.default_rng(20180101)
        for i, j in rng.integers(0, len(ideals), size=(100, 2)):
            a, b = ideals[i], ideals[j]
            assert group7.class_of(a * b) == group7.class_of(a) * group7.class_of(b)

    def test_principal_ideal_one_mod_n_is_trivial(self, field20, group7):
        element = field20.element(1, 7)
        assert rayclass_service.class_of_element(group7, element).is_identity()

    def test_representatives_cover_every_class(self, group5):
        reps = rayclass_service.representatives(group5)
        assert len(reps) == group5.order
        for vector, ideal in reps.items():
            assert group5.log(ideal) == vector
            assert quadfield_service.is_coprime(ideal, group5.modulus)

    def test_alternative_representative(self, group5):
        ray_class = group5.classes[3]
        first = rayclass_service.representative(group5, ray_class)
        second = rayclass_service.alternative_representative(group5, ray_class)
        assert first != second
        assert group5.log(second) == ray_class.vector
        assert second.norm() >= first.norm()

    def test_alternative_representative_search_is_capped(self, group5, monkeypatch):
        monkeypatch.setattr(settings, "REPRESENTATIVE_SEARCH_CAP", 1)
        with pytest.raises(SearchExhausted):
            rayclass_service.alternative_representative(group5, group5.classes[3])

    def test_not_coprime_ideal_rejected(self, field20, group5):
        p5 = quadfield_service.factor_rational_prime(field20, 5)[0][0]
        with pytest.raises(NotCoprime):
            group5.class_of(p5)


class TestDistinguishedClasses:
    """Test C_t and the ring class map"""

    def test_c_t_identity(self, group7):
        assert rayclass_service.c_t(group7, 1).is_identity()
        assert rayclass_service.c_t(group7, 6).is_identity()
        assert not rayclass_service.c_t(group7, 2).is_identity()

    def test_c_t_not_coprime(self, group7):
        with pytest.raises(NotCoprime):
            rayclass_service.c_t(group7, 14)

    def test_ring_class_map_is_homomorphism(self, group7):
        images, kernel = rayclass_service.ring_class_map(group7)
        for s in images:
            for t in images:
                assert images[s * t % 7 or 7] == images[s] * images[t]
        assert kernel == [1, 6]

    @pytest.mark.parametrize("N", [5, 8, 9, 12])
    def test_ring_class_kernel_is_plus_minus_one(self, field20, N):
        group = rayclass_service.rational_group(field20, N)
        _, kernel = rayclass_service.ring_class_map(group)
        assert kernel == sorted({1 % N, (N - 1) % N})

    def test_distinguished_class_in_hilbert_subgroup(self, field20):
        group = rayclass_service.rational_group(field20, 8)
        target = rayclass_service.distinguished_class(group, 2)
        assert rayclass_service.subgroup_hilbert(group).contains(target)


class TestSubgroups:
    """Test the H, H_N and K_(M) subgroups"""

    def test_ring_subgroup_order(self, group7):
        assert rayclass_service.subgroup_ring(group7).order == 3

    def test_hilbert_subgroup_order(self, group7):
        assert rayclass_service.subgroup_hilbert(group7).order == 18

    def test_ring_inside_hilbert(self, group7):
        ring = rayclass_service.subgroup_ring(group7)
        hilbert = rayclass_service.subgroup_hilbert(group7)
        assert ring.is_subset(hilbert)

    def test_subgroups_closed(self, group7):
        for subgroup in (rayclass_service.subgroup_ring(group7), rayclass_service.subgroup_hilbert(group7)):
            assert subgroup.is_closed()

    def test_level_tower(self, field20):
        group = rayclass_service.rational_group(field20, 12)
        for M, level in rayclass_service.level_divisor_groups(field20, 12).items():
            kernel = rayclass_service.kernel(group, level)
            assert kernel.order * level.order == group.order

    def test_subgroup_level_needs_divisor(self, field20, group7):
        with pytest.raises(NotDivisor):
            rayclass_service.subgroup_level(group7, Ideal.rational(field20, 5))

    def test_projection_is_surjective(self, field20):
        group = rayclass_service.rational_group(field20, 12)
        target = rayclass_service.rational_group(field20, 4)
        images = {rayclass_service.project(group, target, c).vector for c in group.classes}
        assert len(images) == target.order

    def test_generated_by(self, group7):
        generator = group7.basis_class(group7.rank - 1)
        subgroup = Subgroup.generated_by(group7, [generator])
        assert subgroup.order == generator.order()


class TestDegrees:
    """Test [K_(N):H], [H_N:H] and the collapse condition"""

    def test_degrees_d20_n7(self, field20):
        assert rayclass_service.degree_KN_over_H(field20, 7) == 18
        assert rayclass_service.degree_ring_over_H(field20, 7) == 6

    @pytest.mark.parametrize("d, N, collapses", [(-23, 10, True), (-31, 10, True), (-20, 10, False), (-23, 12, False)])
    def test_collapses_to_half(self, d, N, collapses):
        field = quadfield_service.make_field(d)
        assert rayclass_service.collapses_to_half(field, N) is collapses

    def test_collapsing_divisors(self):
        field = quadfield_service.make_field(-23)
        assert rayclass_service.collapsing_divisors(field, 10) == [5]
        assert rayclass_service.collapsing_divisors(field, 12) == []

    def test_collapse_means_equal_groups(self):
        field = quadfield_service.make_field(-31)
        assert rayclass_service.rational_group(field, 10).order == rayclass_service.rational_group(field, 5).order


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

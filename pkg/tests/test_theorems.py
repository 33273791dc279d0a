"""
Theorem Tests
Tests for the choice of t, case routing and the generation check
"""

import sys
import os

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import math

import pytest
from pydantic import ValidationError

from src.config.constants import EXCLUDED_LEVELS, T_CHOICE_GCDS
from src.models.ideal import Ideal
from src.models.precision import PrecisionContext
from src.models.rayclass import Subgroup
from src.schemas.theorem import CaseEnum, MainVerdict, TChoice, VerdictEnum
from src.services.quadfield_service import quadfield_service
from src.services.rayclass_service import rayclass_service
from src.services.theorem_service import satisfies_c1, theorem_service
from src.utils.exceptions import NotCoprime, OutOfScope


@pytest.fixture
def ctx():
    return PrecisionContext(digits=30, guard=10)


class TestChoiceOfT:
    """Test (C1), (C2) and choose_t"""

    @pytest.mark.parametrize("N, t, expected", [(7, 2, True), (7, 6, False), (7, 8, False), (10, 4, False), (10, 3, True)])
    def test_satisfies_c1(self, N, t, expected):
        assert satisfies_c1(N, t) is expected

    def test_np_nm(self):
        # 8/10 = 4/5 and 6/10 = 3/5
        assert theorem_service.np_nm(10, 7) == (4, 5, 3, 5)

    def test_np_nm_not_coprime(self):
        with pytest.raises(NotCoprime):
            theorem_service.np_nm(10, 4)

    @pytest.mark.parametrize("N, t", [(10, 7), (14, 9), (15, 11), (18, 5), (20, 11)])
    def test_choose_t_rows(self, N, t):
        assert theorem_service.choose_t(N).t == t

    def test_choose_t_d10_data(self):
        choice = theorem_service.choose_t(10)
        assert (choice.N_plus, choice.N_minus) == (5, 5)
        assert choice.p_plus == choice.p_minus == 2

    @pytest.mark.parametrize("N", [5, 7, 8, 9, 6, 4])
    def test_choose_t_out_of_scope(self, N):
        with pytest.raises(OutOfScope):
            theorem_service.choose_t(N)

    def test_every_admissible_level_up_to_500(self):
        levels = [
            N for N in range(2, 501)
            if N not in EXCLUDED_LEVELS and math.gcd(72, N) in T_CHOICE_GCDS
        ]
        assert levels
        for N in levels:
            choice = theorem_service.choose_t(N)
            assert satisfies_c1(N, choice.t)
            assert N % choice.p_plus == 0 and math.gcd(choice.p_plus, choice.N_plus) == 1
            assert N % choice.p_minus == 0 and math.gcd(choice.p_minus, choice.N_minus) == 1

    def test_fallback_is_smallest_valid(self):
        """N = 54 has no usable listed row"""
        def valid(s):
            if not satisfies_c1(54, s):
                return False
            _, N_plus, _, N_minus = theorem_service.np_nm(54, s)
            return any(N_plus % p for p in (2, 3)) and any(N_minus % p for p in (2, 3))

        assert theorem_service.choose_t(54).t == next(s for s in range(2, 54) if valid(s))

    def test_tchoice_rejects_c1_violation(self):
        with pytest.raises(ValidationError):
            TChoice(N=10, t=9, n_plus=1, N_plus=1, n_minus=4, N_minus=5, p_plus=2, p_minus=2)


class TestCasePlan:
    """Test the routing of N to a character construction"""

    @pytest.mark.parametrize("N, case, t, constant", [
        (8, CaseEnum.case1, 3, -4),
        (9, CaseEnum.case2, 2, -3),
        (5, CaseEnum.case3, 2, -2),
        (12, CaseEnum.prime_power, 5, -4),
    ])
    def test_routing(self, N, case, t, constant):
        plan = theorem_service.case_plan(N)
        assert plan.case == case
        assert plan.t == t
        assert plan.expected_constant == constant

    def test_prime_power_carries_t_choice(self):
        plan = theorem_service.case_plan(12)
        assert plan.t_choice is not None
        assert plan.t_choice.t == plan.t

    @pytest.mark.parametrize("N", [1, 2, 3, 4, 6])
    def test_excluded(self, N):
        with pytest.raises(OutOfScope):
            theorem_service.case_plan(N)

    def test_case3_character(self):
        field = quadfield_service.make_field(-20)
        group = rayclass_service.rational_group(field, 5)
        chi = theorem_service.build_character(group, theorem_service.case_plan(5))
        assert chi.is_trivial_on(rayclass_service.subgroup_ring(group))
        assert not chi.is_trivial_on(rayclass_service.subgroup_hilbert(group))


class TestGeneration:
    """Test verify_main end to end"""

    def test_generated_d20_n7(self, ctx):
        field = quadfield_service.make_field(-20)
        verdict = theorem_service.verify_main(field, 7, ctx)
        assert verdict.verdict == VerdictEnum.generated
        assert verdict.generator_used == "1/N"
        assert verdict.fixing_group_order == 1
        assert verdict.ray_class_order == 36
        assert verdict.distinct_values == 36

    def test_collapse_uses_half_level(self, ctx):
        field = quadfield_service.make_field(-23)
        verdict = theorem_service.verify_main(field, 10, ctx)
        assert verdict.collapses_to_half
        assert verdict.generator_used == "2/N"
        assert verdict.half_level_kernel_matches
        assert verdict.verdict == VerdictEnum.generated
        assert verdict.fixing_group_order * verdict.distinct_values == verdict.ray_class_order

    def test_exceptional_field_rejected(self, ctx):
        with pytest.raises(OutOfScope):
            theorem_service.verify_main(quadfield_service.make_field(-4), 7, ctx)

    def test_excluded_level_rejected(self, ctx):
        with pytest.raises(OutOfScope):
            theorem_service.verify_main(quadfield_service.make_field(-20), 6, ctx)

    def test_verdict_must_match_fixing_group(self):
        with pytest.raises(ValidationError):
            MainVerdict(
                d_K=-20, N=7, generator_used="1/N",
                fixing_group_order=2, ray_class_order=36, distinct_values=18,
                collapses_to_half=False, verdict=VerdictEnum.generated,
            )

    def test_collapse_requires_kernel_match(self, ctx, monkeypatch):
        """A trivial h(2/N) stabilizer is not enough when Fix(h(1/N)) misses the kernel"""
        field = quadfield_service.make_field(-23)
        half_modulus = Ideal.rational(field, 5)
        kernel = rayclass_service.kernel

        def trivial_half_kernel(source, target):
            if target.modulus == half_modulus:
                return Subgroup(source, frozenset({source.identity.vector}))
            return kernel(source, target)

        monkeypatch.setattr(rayclass_service, "kernel", trivial_half_kernel)
        verdict = theorem_service.verify_main(field, 10, ctx)
        assert verdict.half_level_fixing_order == 1
        assert verdict.half_level_kernel_matches is False
        assert verdict.verdict == VerdictEnum.not_generated

    def test_kernel_mismatch_cannot_be_generated(self):
        with pytest.raises(ValidationError):
            MainVerdict(
                d_K=-23, N=10, generator_used="2/N",
                fixing_group_order=2, ray_class_order=24, distinct_values=12,
                collapses_to_half=True, half_level_kernel_matches=False,
                half_level_fixing_order=1, verdict=VerdictEnum.generated,
            )

    @pytest.mark.parametrize("d, N", [(-20, 7), (-23, 10)])
    def test_verdict_stable_under_doubled_precision(self, d, N):
        field = quadfield_service.make_field(d)
        base = theorem_service.verify_main(field, N, PrecisionContext(digits=30, guard=10))
        doubled = theorem_service.verify_main(field, N, PrecisionContext(digits=60, guard=10))
        assert doubled.verdict == base.verdict
        assert doubled.fixing_group_order == base.fixing_group_order
        assert doubled.distinct_values == base.distinct_values

    def test_b_conditions_d20_n7(self, ctx):
        report = theorem_service.b_conditions(quadfield_service.make_field(-20), 7, ctx)
        conditions = {c.name: c for c in report.conditions}
        assert set(conditions) == {"B1", "B2", "B3"}
        # h(1/7) generates, so there is nothing left for chi to detect
        assert not conditions["B1"].holds
        assert conditions["B2"].holds
        assert conditions["B3"].holds

    @pytest.mark.slow
    @pytest.mark.parametrize("d", [-20, -23, -31])
    @pytest.mark.parametrize("N", [5, 7, 8, 9, 12])
    def test_generation_matrix(self, d, N):
        ctx = PrecisionContext(digits=60, guard=10)
        verdict = theorem_service.verify_main(quadfield_service.make_field(d), N, ctx)
        assert verdict.verdict == VerdictEnum.generated
        assert verdict.fixing_group_order * verdict.distinct_values == verdict.ray_class_order


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

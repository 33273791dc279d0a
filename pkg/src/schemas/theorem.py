"""
Theorem Schemas - Pydantic V2
Choice of t, case plans and main verdicts
"""

from pydantic import BaseModel, Field, model_validator
from typing import List, Optional
from enum import Enum
import math


class CaseEnum(str, Enum):
    """Character construction routes"""
    case1 = "case1"
    case2 = "case2"
    case3 = "case3"
    prime_power = "prime_power"


class VerdictEnum(str, Enum):
    """Outcome of the generation check"""
    generated = "generated"
    not_generated = "not_generated"
    indeterminate = "indeterminate"


class TChoice(BaseModel):
    """An integer t with (C1) and (C2) and its N_+-/n_+- data"""
    N: int = Field(gt=1)
    t: int
    n_plus: int
    N_plus: int
    n_minus: int
    N_minus: int
    p_plus: int
    p_minus: int

    @model_validator(mode="after")
    def check_conditions(self):
        """(C1): gcd(N, t) = 1 and t != +-1 mod N; (C2): p_+- | N prime to N_+-"""
        N, t = self.N, self.t
        if math.gcd(N, t) != 1 or t % N in (1, N - 1):
            raise ValueError(f"t={t} violates (C1) for N={N}")
        if self.N_plus <= 1 or self.N_minus <= 1:
            raise ValueError("N_+ and N_- must exceed 1")
        for p, M in ((self.p_plus, self.N_plus), (self.p_minus, self.N_minus)):
            if N % p or math.gcd(p, M) != 1:
                raise ValueError(f"p={p} violates (C2) for N={N}")
        return self


class CasePlan(BaseModel):
    """Which character, which t and which constant to test"""
    N: int
    case: CaseEnum
    t: int
    expected_constant: int
    distinguished_divisor: Optional[int] = None
    t_choice: Optional[TChoice] = None


class MainVerdict(BaseModel):
    """Result of the generation check for one (d_K, N)"""
    d_K: int
    N: int
    generator_used: str
    fixing_group_order: int
    ray_class_order: int
    distinct_values: int
    collapses_to_half: bool
    half_level_kernel_matches: Optional[bool] = None
    half_level_fixing_order: Optional[int] = None
    verdict: VerdictEnum

    @model_validator(mode="after")
    def check_verdict(self):
        """
        generated iff the fixing group of the generator used is trivial.
        On collapse the fixing group of h(1/N) must also be the kernel of
        Cl(N) -> Cl(N/2).
        """
        if self.generator_used == "2/N":
            order = self.half_level_fixing_order
            holds = order == 1 and self.half_level_kernel_matches is True
        else:
            holds = self.fixing_group_order == 1
        if self.verdict != VerdictEnum.indeterminate and (self.verdict == VerdictEnum.generated) != holds:
            raise ValueError("verdict disagrees with the fixing group")
        return self


class BCondition(BaseModel):
    """One hypothesis of the Stickelberger argument"""
    name: str
    holds: bool
    detail: str


class BConditionsReport(BaseModel):
    """Hypothesis report for the planned (chi, t)"""
    d_K: int
    N: int
    t: int
    conditions: List[BCondition]

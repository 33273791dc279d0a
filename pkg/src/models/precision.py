"""
Precision Models
Working precision policy, torsion indices and points of the upper half-plane
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple
import math

import mpmath
from pydantic import BaseModel, ConfigDict, Field

from src.config.settings import settings


class PrecisionContext(BaseModel):
    """
    Working precision for every analytic evaluation

    Values are computed at digits + guard decimal digits; comparisons use
    thresholds derived from digits alone.
    """

    model_config = ConfigDict(frozen=True)

    digits: int = Field(default_factory=lambda: settings.DEFAULT_DIGITS, ge=30)
    guard: int = Field(default_factory=lambda: settings.GUARD_DIGITS, ge=10)
    max_escalations: int = Field(default_factory=lambda: settings.MAX_ESCALATIONS, ge=0)

    @property
    def working_dps(self) -> int:
        return self.digits + self.guard

    def workdps(self):
        """mpmath context manager at the working precision"""
        return mpmath.workdps(self.working_dps)

    def escalated(self) -> "PrecisionContext":
        """Same policy at doubled digits, one escalation used up"""
        return PrecisionContext(
            digits=2 * self.digits,
            guard=self.guard,
            max_escalations=max(self.max_escalations - 1, 0),
        )

    @property
    def equal_threshold(self) -> mpmath.mpf:
        return mpmath.mpf(10) ** (-(3 * self.digits) // 4)

    @property
    def distinct_threshold(self) -> mpmath.mpf:
        return mpmath.mpf(10) ** (-self.digits // 4)

    @property
    def identity_tolerance(self) -> mpmath.mpf:
        """Bound for residuals of exact identities"""
        return mpmath.mpf(10) ** (-(self.digits - self.guard))

    @property
    def lattice_tolerance(self) -> mpmath.mpf:
        return mpmath.mpf(10) ** (-self.digits // 2)


@dataclass(frozen=True)
class TorsionVector:
    """Index (r1, r2) in (1/N)Z^2 for Fricke and Siegel functions"""

    r1: Fraction
    r2: Fraction

    @classmethod
    def of(cls, r1, r2) -> "TorsionVector":
        return cls(Fraction(r1), Fraction(r2))

    @property
    def level(self) -> int:
        """Least N with N*v integral"""
        a, b = self.r1.denominator, self.r2.denominator
        return a * b // math.gcd(a, b)

    def is_integral(self) -> bool:
        return self.r1.denominator == 1 and self.r2.denominator == 1

    def __neg__(self) -> "TorsionVector":
        return TorsionVector(-self.r1, -self.r2)

    def __add__(self, other: "TorsionVector") -> "TorsionVector":
        return TorsionVector(self.r1 + other.r1, self.r2 + other.r2)

    def reduced(self) -> "TorsionVector":
        """Representative with 0 <= r_i < 1"""
        return TorsionVector(self.r1 % 1, self.r2 % 1)

    def canonical(self) -> "TorsionVector":
        """Lexicographically least of the reductions of v and -v"""
        plus, minus = self.reduced(), (-self).reduced()
        return min(plus, minus, key=lambda v: (v.r1, v.r2))

    def times(self, matrix: Tuple[Tuple[int, int], Tuple[int, int]]) -> "TorsionVector":
        """Row vector product v * M"""
        (a, b), (c, d) = matrix
        return TorsionVector(self.r1 * a + self.r2 * c, self.r1 * b + self.r2 * d)

    def __str__(self) -> str:
        return f"({self.r1}, {self.r2})"


@dataclass(frozen=True)
class HPoint:
    """Point tau of the upper half-plane"""

    tau: mpmath.mpc

    def __post_init__(self):
        if not mpmath.im(self.tau) > 0:
            raise ValueError(f"tau = {self.tau} is not in the upper half-plane")

    @classmethod
    def of(cls, value) -> "HPoint":
        return cls(mpmath.mpc(value))

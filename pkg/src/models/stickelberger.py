"""
Stickelberger Models
Values produced by the limit formula computations, kept at full precision
"""

from dataclasses import dataclass, field as dataclass_field
from typing import Dict, Optional

import mpmath

from src.models.character import Character
from src.models.ideal import Ideal


@dataclass(frozen=True)
class StickelbergerReport:
    """S(chi) with the provenance of the table it was summed over"""

    character: Character
    value: mpmath.mpc
    modulus: Ideal
    digits: int
    guard: int


@dataclass(frozen=True)
class LValue:
    """Smoothed L_f(1, chi_0) with its self-reported error"""

    value: mpmath.mpc
    error: mpmath.mpf
    cutoff: int


@dataclass
class DecompositionSides:
    """
    Both sides of the Weber difference decomposition

    level_terms maps each of "plus" and "minus" to its (N/N_pm) block;
    kernel_sums records the exact inner sums over the level kernels.
    """

    lhs: mpmath.mpc
    rhs: mpmath.mpc
    level_terms: Dict[str, mpmath.mpc] = dataclass_field(default_factory=dict)
    kernel_sums: Dict[str, int] = dataclass_field(default_factory=dict)
    stickelberger_term: mpmath.mpc = mpmath.mpc(0)
    j_term: Optional[mpmath.mpc] = None

    @property
    def residual(self) -> mpmath.mpf:
        return abs(self.lhs - self.rhs) / max(mpmath.mpf(1), abs(self.rhs))


@dataclass(frozen=True)
class CaseConstantResult:
    """Measured S(chi_bar, xi_t) / S(chi_bar) against the expected integer"""

    ratio: mpmath.mpc
    expected: int
    stickelberger_abs: mpmath.mpf
    tolerance: mpmath.mpf

    @property
    def deviation(self) -> mpmath.mpf:
        return abs(self.ratio - self.expected)

    @property
    def passed(self) -> bool:
        return self.deviation < self.tolerance and self.stickelberger_abs > mpmath.mpf(10) ** -10


@dataclass(frozen=True)
class KroneckerSides:
    """L-side and invariant side of the second limit formula"""

    lhs: mpmath.mpc
    rhs: mpmath.mpc
    l_value: LValue
    euler_factor: mpmath.mpc
    gamma_spread: Optional[mpmath.mpf] = None

    @property
    def residual(self) -> mpmath.mpf:
        return abs(self.lhs - self.rhs) / abs(self.rhs)

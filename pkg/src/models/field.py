"""
Field Model
Imaginary quadratic field K = Q(sqrt(d_K)) with O_K = Z + Z*tau_K
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple, Union
import math

import mpmath

Rational = Union[int, Fraction]


def mul_coords(x1, y1, x2, y2, d: int, n: int):
    """(x1 + y1*tau)(x2 + y2*tau) with tau^2 = d*tau - n"""
    yy = y1 * y2
    return x1 * x2 - yy * n, x1 * y2 + y1 * x2 + yy * d


@dataclass(frozen=True)
class Field:
    """
    Imaginary quadratic field fixed by its fundamental discriminant

    tau_K = (d_K + sqrt(d_K)) / 2 satisfies tau^2 = d_K*tau - n with
    n = (d_K^2 - d_K) / 4.
    """

    d: int

    @property
    def n(self) -> int:
        """Norm of tau_K"""
        return (self.d * self.d - self.d) // 4

    @property
    def unit_count(self) -> int:
        if self.d == -4:
            return 4
        if self.d == -3:
            return 6
        return 2

    def tau(self) -> mpmath.mpc:
        """Complex embedding of tau_K at the current mpmath precision"""
        return mpmath.mpc(mpmath.mpf(self.d) / 2, mpmath.sqrt(abs(self.d)) / 2)

    def element(self, x: Rational, y: Rational = 0) -> "FieldElement":
        return FieldElement(self, Fraction(x), Fraction(y))

    @property
    def one(self) -> "FieldElement":
        return self.element(1)

    @property
    def tau_element(self) -> "FieldElement":
        return self.element(0, 1)

    @property
    def sqrt_d(self) -> "FieldElement":
        """sqrt(d_K) = 2*tau_K - d_K"""
        return self.element(-self.d, 2)

    def units(self) -> List["FieldElement"]:
        """
        Roots of unity of O_K, generator powers in order

        Returns:
            List of units [1, zeta, zeta^2, ...]
        """
        if self.d == -4:
            generator = self.element(2, 1)  # i = tau + 2
        elif self.d == -3:
            generator = self.element(2, 1)  # zeta_6 = tau + 2
        else:
            generator = self.element(-1)
        units = [self.one]
        while len(units) < self.unit_count:
            units.append(units[-1] * generator)
        return units

    def unit_coords(self) -> List[Tuple[int, int]]:
        return [(int(u.x), int(u.y)) for u in self.units()]

    def __str__(self) -> str:
        return f"Q(sqrt({self.d}))"


@dataclass(frozen=True)
class FieldElement:
    """Element x + y*tau_K with rational coordinates"""

    field: Field
    x: Fraction
    y: Fraction

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            return other
        return FieldElement(self.field, Fraction(other), Fraction(0))

    def __add__(self, other) -> "FieldElement":
        other = self._coerce(other)
        return FieldElement(self.field, self.x + other.x, self.y + other.y)

    __radd__ = __add__

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field, -self.x, -self.y)

    def __sub__(self, other) -> "FieldElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "FieldElement":
        return self._coerce(other) - self

    def __mul__(self, other) -> "FieldElement":
        other = self._coerce(other)
        x, y = mul_coords(self.x, self.y, other.x, other.y, self.field.d, self.field.n)
        return FieldElement(self.field, x, y)

    __rmul__ = __mul__

    def conjugate(self) -> "FieldElement":
        """conj(tau) = d_K - tau"""
        return FieldElement(self.field, self.x + self.y * self.field.d, -self.y)

    def norm(self) -> Fraction:
        d, n = self.field.d, self.field.n
        return self.x * self.x + self.x * self.y * d + self.y * self.y * n

    def trace(self) -> Fraction:
        return 2 * self.x + self.y * self.field.d

    def inverse(self) -> "FieldElement":
        norm = self.norm()
        if norm == 0:
            raise ZeroDivisionError("inverse of zero element")
        conj = self.conjugate()
        return FieldElement(self.field, conj.x / norm, conj.y / norm)

    def __truediv__(self, other) -> "FieldElement":
        return self * self._coerce(other).inverse()

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_integral(self) -> bool:
        return self.x.denominator == 1 and self.y.denominator == 1

    def denominator(self) -> int:
        a, b = self.x.denominator, self.y.denominator
        return a * b // math.gcd(a, b)

    def embed(self) -> mpmath.mpc:
        """Complex value at the current mpmath precision"""
        x = mpmath.mpf(self.x.numerator) / self.x.denominator
        y = mpmath.mpf(self.y.numerator) / self.y.denominator
        return x + y * self.field.tau()

    def __str__(self) -> str:
        return f"{self.x} + {self.y}*tau"

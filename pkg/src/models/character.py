"""
Character Model
Characters of a ray class group with exact rational exponents
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import mpmath

from src.models.rayclass import RayClass, RayClassGroup, Subgroup, Vector


@dataclass(frozen=True, eq=False)
class Character:
    """
    chi(C) = exp(2*pi*i * sum_j a_j c_j / d_j)

    Values are kept as exponents in Q/Z so group laws and orthogonality
    are exact; complex values are produced only on request.
    """

    group: RayClassGroup
    exponents: Vector

    def __eq__(self, other) -> bool:
        if not isinstance(other, Character):
            return NotImplemented
        return self.group.modulus == other.group.modulus and self.exponents == other.exponents

    def __hash__(self) -> int:
        return hash((self.group.modulus, self.exponents))

    def exponent(self, ray_class: RayClass) -> Fraction:
        """chi(C) as an element of [0, 1)"""
        total = sum(
            (Fraction(a * c, d) for a, c, d in zip(self.exponents, ray_class.vector, self.group.snf)),
            Fraction(0),
        )
        return total % 1

    def value(self, ray_class: RayClass) -> mpmath.mpc:
        """Complex value at the current mpmath precision"""
        e = self.exponent(ray_class)
        return mpmath.expjpi(2 * mpmath.mpf(e.numerator) / e.denominator)

    def __call__(self, ray_class: RayClass) -> mpmath.mpc:
        return self.value(ray_class)

    def is_one_at(self, ray_class: RayClass) -> bool:
        return self.exponent(ray_class) == 0

    def is_principal(self) -> bool:
        return not any(self.exponents)

    def is_trivial_on(self, subgroup: Subgroup) -> bool:
        return all(self.is_one_at(c) for c in subgroup.elements)

    def is_trivial_on_classes(self, classes: Iterable[RayClass]) -> bool:
        return all(self.is_one_at(c) for c in classes)

    def conjugate(self) -> "Character":
        return Character(self.group, self.group.reduce(-a for a in self.exponents))

    def __mul__(self, other: "Character") -> "Character":
        return Character(self.group, self.group.reduce(a + b for a, b in zip(self.exponents, other.exponents)))

    def __str__(self) -> str:
        return f"chi{list(self.exponents)} on Cl({self.group.modulus})"

"""
Ideal Model
Fractional O_K-ideals as (integral HNF lattice, positive denominator)
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Tuple
import math

from src.models.field import Field, FieldElement, mul_coords
from src.utils.arith import lattice_hnf


@dataclass(frozen=True)
class Ideal:
    """
    Fractional ideal (1/denominator) * (a*Z + (b + c*tau_K)*Z)

    The integral lattice is kept in canonical HNF: c | a, c | b and
    0 <= b < a; the denominator shares no factor with the content c.
    Equality is HNF equality.
    """

    field: Field
    a: int
    b: int
    c: int
    denominator: int = 1

    # Construction

    @classmethod
    def from_vectors(cls, field: Field, vectors: Iterable[Tuple[int, int]], denominator: int = 1) -> "Ideal":
        """Ideal spanned over Z by integer coordinate vectors, divided by denominator"""
        a, b, c = lattice_hnf(vectors)
        g = math.gcd(denominator, c)
        if g > 1:
            a, b, c, denominator = a // g, b // g, c // g, denominator // g
        return cls(field, a, b, c, denominator)

    @classmethod
    def from_generators(cls, field: Field, generators: Iterable[FieldElement]) -> "Ideal":
        """O_K-ideal generated by the given elements"""
        elements = [g for g in generators if not g.is_zero()]
        if not elements:
            raise ValueError("zero ideal")
        den = 1
        for g in elements:
            den = den * g.denominator() // math.gcd(den, g.denominator())
        vectors: List[Tuple[int, int]] = []
        d, n = field.d, field.n
        for g in elements:
            x, y = int(g.x * den), int(g.y * den)
            vectors.append((x, y))
            vectors.append(mul_coords(x, y, 0, 1, d, n))
        return cls.from_vectors(field, vectors, den)

    @classmethod
    def principal(cls, element: FieldElement) -> "Ideal":
        return cls.from_generators(element.field, [element])

    @classmethod
    def unit(cls, field: Field) -> "Ideal":
        return cls(field, 1, 0, 1, 1)

    @classmethod
    def rational(cls, field: Field, m: int) -> "Ideal":
        """The ideal (m) for a positive integer m"""
        return cls(field, m, 0, m, 1)

    # Lattice data

    def z_basis(self) -> Tuple[FieldElement, FieldElement]:
        """Z-basis (a, b + c*tau) scaled by 1/denominator"""
        f = self.field
        den = Fraction(1, self.denominator)
        return f.element(self.a * den), f.element(self.b * den, self.c * den)

    def vectors(self) -> List[Tuple[int, int]]:
        """Integral lattice basis as coordinate vectors"""
        return [(self.a, 0), (self.b, self.c)]

    @property
    def content(self) -> int:
        return self.c

    def primitive_part(self) -> Tuple[int, int]:
        """(a', b') with the primitive lattice a'*Z + (b' + tau)*Z"""
        return self.a // self.c, self.b // self.c

    def norm(self) -> Fraction:
        return Fraction(self.a * self.c, self.denominator * self.denominator)

    def is_integral(self) -> bool:
        return self.denominator == 1

    def is_unit(self) -> bool:
        return (self.a, self.b, self.c, self.denominator) == (1, 0, 1, 1)

    def sort_key(self) -> Tuple:
        return (self.norm(), self.a, self.b, self.c, self.denominator)

    # Arithmetic

    def __mul__(self, other: "Ideal") -> "Ideal":
        d, n = self.field.d, self.field.n
        vectors = [
            mul_coords(x1, y1, x2, y2, d, n)
            for x1, y1 in self.vectors()
            for x2, y2 in other.vectors()
        ]
        return Ideal.from_vectors(self.field, vectors, self.denominator * other.denominator)

    def __pow__(self, exponent: int) -> "Ideal":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = Ideal.unit(self.field)
        for _ in range(exponent):
            result = result * self
        return result

    def conjugate(self) -> "Ideal":
        d = self.field.d
        return Ideal.from_vectors(self.field, [(self.a, 0), (self.b + self.c * d, -self.c)], self.denominator)

    def inverse(self) -> "Ideal":
        """
        conj(L) / N(L) for the integral lattice L, times the denominator
        """
        d, den = self.field.d, self.denominator
        vectors = [(self.a * den, 0), ((self.b + self.c * d) * den, -self.c * den)]
        return Ideal.from_vectors(self.field, vectors, self.a * self.c)

    def scale(self, element: FieldElement) -> "Ideal":
        return self * Ideal.principal(element)

    def __add__(self, other: "Ideal") -> "Ideal":
        den = self.denominator * other.denominator // math.gcd(self.denominator, other.denominator)
        vectors = [(x * den // self.denominator, y * den // self.denominator) for x, y in self.vectors()]
        vectors += [(x * den // other.denominator, y * den // other.denominator) for x, y in other.vectors()]
        return Ideal.from_vectors(self.field, vectors, den)

    def contains(self, element: FieldElement) -> bool:
        """Membership test in the fractional lattice"""
        x = element.x * self.denominator
        y = element.y * self.denominator
        if x.denominator != 1 or y.denominator != 1:
            return False
        x, y = int(x), int(y)
        if y % self.c:
            return False
        k = y // self.c
        return (x - k * self.b) % self.a == 0

    def divides(self, other: "Ideal") -> bool:
        """self | other, i.e. other is contained in self"""
        return all(self.contains(g) for g in other.z_basis())

    def __str__(self) -> str:
        body = f"[{self.a}, {self.b} + {self.c}*tau]"
        if self.denominator != 1:
            return f"{body}/{self.denominator}"
        return body

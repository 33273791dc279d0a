"""
Quadratic Field Service
Exact arithmetic of imaginary quadratic fields: primes, ideals, principality,
residues modulo ideals and reduced binary quadratic forms
"""

from fractions import Fraction
from functools import lru_cache
from itertools import count, product
from typing import Iterator, List, Optional, Tuple
import math

from sympy import factorint, primefactors, primerange
from sympy.ntheory import sqrt_mod

from src.models.field import Field, FieldElement, mul_coords
from src.models.ideal import Ideal
from src.utils.arith import kronecker_at, nearest_integer
from src.utils.exceptions import NotFundamental, NotImaginary, NotIntegral, ZeroIdeal
from src.utils.logger import setup_logger

logger = setup_logger()

Form = Tuple[int, int, int]
Residue = Tuple[int, int]


def is_fundamental(d: int) -> bool:
    """d = 1 mod 4 squarefree, or d = 4m with m = 2, 3 mod 4 squarefree"""
    def squarefree(m: int) -> bool:
        return all(e == 1 for e in factorint(abs(m)).values())

    if d % 4 == 1:
        return squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


class QuadFieldService:
    """Service for exact field and ideal arithmetic"""

    # Fields

    def make_field(self, d: int) -> Field:
        """
        Build the field of fundamental discriminant d

        Args:
            d: Negative fundamental discriminant

        Returns:
            Field with tau_K and unit count

        Raises:
            NotImaginary: If d >= 0
            NotFundamental: If d is not a fundamental discriminant
        """
        if d >= 0:
            logger.error(f"Rejected discriminant {d}: not negative")
            raise NotImaginary(f"discriminant {d} is not negative")
        if not is_fundamental(d):
            logger.error(f"Rejected discriminant {d}: not fundamental")
            raise NotFundamental(f"{d} is not a fundamental discriminant")
        return Field(d)

    def kronecker_symbol(self, d: int, p: int) -> int:
        """Legendre symbol for odd p, Kronecker symbol at 2"""
        return kronecker_at(d, p)

    def different(self, field: Field) -> Ideal:
        """The different ideal (sqrt(d_K))"""
        return Ideal.principal(field.sqrt_d)

    # Prime ideals

    def _tau_roots(self, field: Field, p: int) -> List[int]:
        """Roots of x^2 - d*x + n modulo p"""
        d, n = field.d, field.n
        if p == 2:
            return [r for r in (0, 1) if (r * r - d * r + n) % 2 == 0]
        half = pow(2, -1, p)
        roots = {((d + s) * half) % p for s in sqrt_mod(d % p, p, all_roots=True)}
        return sorted(roots)

    @lru_cache(maxsize=None)
    def factor_rational_prime(self, field: Field, p: int) -> List[Tuple[Ideal, int]]:
        """
        Prime ideal factorization of (p)

        Args:
            field: Field
            p: Rational prime

        Returns:
            List of (prime ideal, exponent) in HNF order
        """
        symbol = self.kronecker_symbol(field.d, p)
        if symbol == -1:
            return [(Ideal.rational(field, p), 1)]
        primes = sorted(
            (Ideal(field, p, (-r) % p, 1) for r in self._tau_roots(field, p)),
            key=lambda ideal: ideal.sort_key(),
        )
        if symbol == 0:
            return [(primes[0], 2)]
        return [(prime, 1) for prime in primes]

    def prime_ideals_up_to(self, field: Field, norm_bound: int) -> List[Ideal]:
        """All prime ideals of norm <= norm_bound ordered by (norm, HNF)"""
        primes: List[Ideal] = []
        for p in primerange(2, norm_bound + 1):
            for prime, _ in self.factor_rational_prime(field, p):
                if prime.norm() <= norm_bound:
                    primes.append(prime)
        return sorted(primes, key=lambda ideal: ideal.sort_key())

    # Ideal arithmetic

    def _require_nonzero(self, *ideals: Ideal) -> None:
        for ideal in ideals:
            if ideal is None or ideal.a == 0 or ideal.c == 0:
                raise ZeroIdeal("operation requires a nonzero ideal")

    def ideal_mul(self, a: Ideal, b: Ideal) -> Ideal:
        self._require_nonzero(a, b)
        return a * b

    def ideal_inverse(self, a: Ideal) -> Ideal:
        self._require_nonzero(a)
        return a.inverse()

    def ideal_norm(self, a: Ideal) -> Fraction:
        self._require_nonzero(a)
        return a.norm()

    def is_coprime(self, a: Ideal, b: Ideal) -> bool:
        """a + b = O_K for integral ideals"""
        self._require_nonzero(a, b)
        if math.gcd(int(a.norm()), int(b.norm())) == 1:
            return True
        return (a + b).is_unit()

    def least_positive_integer(self, m: Ideal) -> int:
        """Generator of m ∩ Z (the HNF coefficient a)"""
        self._require_nonzero(m)
        if not m.is_integral():
            raise NotIntegral("least_positive_integer expects an integral ideal")
        return m.a

    # Principality

    def _norm_int(self, field: Field, x: int, y: int) -> int:
        return x * x + x * y * field.d + y * y * field.n

    def _bilinear2(self, field: Field, u: Residue, v: Residue) -> int:
        """Tr(u * conj(v)), twice the norm-form bilinear pairing"""
        cx, cy = v[0] + v[1] * field.d, -v[1]
        x, y = mul_coords(u[0], u[1], cx, cy, field.d, field.n)
        return 2 * x + y * field.d

    def shortest_vector(self, field: Field, u: Residue, v: Residue) -> Residue:
        """
        Lagrange-Gauss reduction of a lattice basis under the norm form

        Args:
            field: Field
            u, v: Basis vectors as integer coordinates

        Returns:
            A vector of minimal norm in the lattice
        """
        qu, qv = self._norm_int(field, *u), self._norm_int(field, *v)
        if qu > qv:
            u, v, qu, qv = v, u, qv, qu
        while True:
            m = nearest_integer(Fraction(self._bilinear2(field, u, v), 2 * qu))
            v = (v[0] - m * u[0], v[1] - m * u[1])
            qv = self._norm_int(field, *v)
            if qv >= qu:
                return u
            u, v, qu, qv = v, u, qv, qu

    def canonical_associate(self, element: FieldElement) -> FieldElement:
        """Unit multiple with the lexicographically largest coordinates"""
        return max((element * unit for unit in element.field.units()), key=lambda e: (e.x, e.y))

    def is_principal_with_generator(self, a: Ideal) -> Optional[FieldElement]:
        """
        Decide principality of an integral ideal

        The reduced first basis vector has minimal norm; the ideal is
        principal iff that norm equals N(a), and the vector then generates.

        Args:
            a: Integral nonzero ideal

        Returns:
            Generator (canonical up to units) or None
        """
        self._require_nonzero(a)
        if not a.is_integral():
            raise NotIntegral("principality test expects an integral ideal")
        field = a.field
        u = self.shortest_vector(field, (a.a, 0), (a.b, a.c))
        if self._norm_int(field, *u) != a.a * a.c:
            return None
        return self.canonical_associate(field.element(*u))

    # Units modulo ideals

    def unit_count_mod(self, field: Field, m: Ideal) -> int:
        """Number of roots of unity congruent to 1 modulo m"""
        self._require_nonzero(m)
        return sum(1 for unit in field.units() if m.contains(unit - 1))

    # Enumeration

    @lru_cache(maxsize=4096)
    def _primitive_offsets(self, field: Field, a: int) -> Tuple[int, ...]:
        """b' in [0, a) with a | b'^2 + b'*d + n"""
        if a == 1:
            return (0,)
        d = field.d
        roots = sqrt_mod(d % (4 * a), 4 * a, all_roots=True) or []
        return tuple(sorted({((y - d) // 2) % a for y in roots}))

    def ideals_of_norm(self, field: Field, norm: int) -> List[Ideal]:
        """All integral ideals of the given norm in HNF order"""
        ideals: List[Ideal] = []
        content = 1
        while content * content <= norm:
            if norm % (content * content) == 0:
                a = norm // (content * content)
                for b in self._primitive_offsets(field, a):
                    ideals.append(Ideal(field, content * a, content * b, content))
            content += 1
        return sorted(ideals, key=lambda ideal: ideal.sort_key())

    def iter_integral_ideals(self, field: Field, coprime_to: Optional[Ideal] = None, start: int = 1) -> Iterator[Ideal]:
        """Unbounded stream of integral ideals ordered by (norm, HNF)"""
        for norm in count(start):
            for ideal in self.ideals_of_norm(field, norm):
                if coprime_to is None or self.is_coprime(ideal, coprime_to):
                    yield ideal

    def enumerate_integral_ideals(self, field: Field, norm_bound: int, coprime_to: Optional[Ideal] = None) -> Iterator[Ideal]:
        """
        Integral ideals of norm <= norm_bound coprime to a modulus

        Args:
            field: Field
            norm_bound: Largest norm
            coprime_to: Optional modulus

        Returns:
            Iterator over ideals ordered by (norm, HNF), each exactly once
        """
        for norm in range(1, norm_bound + 1):
            for ideal in self.ideals_of_norm(field, norm):
                if coprime_to is None or self.is_coprime(ideal, coprime_to):
                    yield ideal

    # Factorization of moduli

    @lru_cache(maxsize=None)
    def factor_ideal(self, m: Ideal) -> Tuple[Tuple[Ideal, int], ...]:
        """
        Prime ideal factorization of an integral ideal

        Args:
            m: Integral nonzero ideal

        Returns:
            Tuple of (prime ideal, exponent) in HNF order
        """
        self._require_nonzero(m)
        factors = []
        for p in primefactors(m.a):
            for prime, _ in self.factor_rational_prime(m.field, p):
                exponent = 0
                power = prime
                while power.divides(m):
                    exponent += 1
                    power = power * prime
                if exponent:
                    factors.append((prime, exponent))
        return tuple(sorted(factors, key=lambda item: item[0].sort_key()))

    def ideal_divisors(self, m: Ideal) -> List[Ideal]:
        """All integral divisors of m ordered by (norm, HNF)"""
        factors = self.factor_ideal(m)
        divisors = []
        for exponents in product(*(range(e + 1) for _, e in factors)):
            divisor = Ideal.unit(m.field)
            for (prime, _), k in zip(factors, exponents):
                divisor = divisor * prime ** k
            divisors.append(divisor)
        return sorted(divisors, key=lambda ideal: ideal.sort_key())

    def phi(self, m: Ideal) -> int:
        """|(O_K/m)^*| from the prime factorization"""
        total = 1
        for prime, e in self.factor_ideal(m):
            q = int(prime.norm())
            total *= (q - 1) * q ** (e - 1)
        return total

    # Residues modulo an ideal

    def residue(self, m: Ideal, x: int, y: int) -> Residue:
        """Canonical representative (x0, y0), 0 <= x0 < a, 0 <= y0 < c"""
        y0 = y % m.c
        k = (y - y0) // m.c
        return (x - k * m.b) % m.a, y0

    def residue_of(self, m: Ideal, element: FieldElement) -> Residue:
        """Residue of an element whose denominator is prime to m"""
        den = element.denominator()
        inv = pow(den, -1, m.a) if m.a > 1 else 0
        x, y = int(element.x * den), int(element.y * den)
        return self.residue(m, x * inv, y * inv)

    def mul_residues(self, m: Ideal, u: Residue, v: Residue) -> Residue:
        x, y = mul_coords(u[0], u[1], v[0], v[1], m.field.d, m.field.n)
        return self.residue(m, x, y)

    def is_unit_mod(self, m: Ideal, x: int, y: int) -> bool:
        """True iff x + y*tau lies in no prime ideal dividing m"""
        element = m.field.element(x, y)
        return not any(prime.contains(element) for prime, _ in self.factor_ideal(m))

    @lru_cache(maxsize=None)
    def unit_residues(self, m: Ideal) -> Tuple[Residue, ...]:
        """(O_K/m)^* as canonical residues in lexicographic order"""
        residues = tuple(
            (x, y)
            for x in range(m.a)
            for y in range(m.c)
            if self.is_unit_mod(m, x, y)
        )
        logger.debug(f"(O_K/{m})^* has {len(residues)} elements")
        return residues

    # Binary quadratic forms

    def reduce_form(self, a: int, b: int, c: int) -> Form:
        """Reduce a positive definite form to |b| <= a <= c, b >= 0 on the boundary"""
        disc = b * b - 4 * a * c
        while True:
            if b > a or b <= -a:
                k = (a - b) // (2 * a)
                b = b + 2 * a * k
                c = (b * b - disc) // (4 * a)
            if a > c:
                a, b, c = c, -b, a
                continue
            if a == c and b < 0:
                b = -b
            return a, b, c

    @lru_cache(maxsize=None)
    def reduced_forms(self, d: int) -> Tuple[Form, ...]:
        """Reduced primitive forms of discriminant d in lexicographic order"""
        forms = []
        a = 1
        while 3 * a * a <= -d:
            for b in range(-a + 1, a + 1):
                if (b - d) % 2 or (b * b - d) % (4 * a):
                    continue
                c = (b * b - d) // (4 * a)
                if c < a or (a == c and b < 0):
                    continue
                if math.gcd(math.gcd(a, b), c) != 1:
                    continue
                forms.append((a, b, c))
            a += 1
        return tuple(sorted(forms))

    def class_number(self, field: Field) -> int:
        return len(self.reduced_forms(field.d))

    def form_of_ideal(self, ideal: Ideal) -> Form:
        """Reduced form of the ideal class: [a, (-b + sqrt d)/2] -> (a, b, c)"""
        field = ideal.field
        a, b_offset = ideal.primitive_part()
        c = (b_offset * b_offset + b_offset * field.d + field.n) // a
        return self.reduce_form(a, -(2 * b_offset + field.d), c)

    def ideal_of_form(self, field: Field, form: Form) -> Ideal:
        a, b, _ = form
        return Ideal(field, a, ((-b - field.d) // 2) % a, 1)


# Singleton instance
quadfield_service = QuadFieldService()

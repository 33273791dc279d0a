"""
Character Service
Dual groups, conductors, primitive descent, Gauss sums and the character
searches feeding the Stickelberger computations
"""

from collections import Counter
from fractions import Fraction
from itertools import product
from typing import Dict, Iterator, List, Tuple
import math

import mpmath
from sympy import factorint

from src.config.constants import CHARACTER_A_GCDS
from src.config.settings import settings
from src.models.character import Character
from src.models.field import Field, FieldElement
from src.models.ideal import Ideal
from src.models.precision import PrecisionContext
from src.models.rayclass import RayClass, RayClassGroup, Subgroup
from src.services.quadfield_service import quadfield_service
from src.services.rayclass_service import rayclass_service
from src.utils.exceptions import (
    AlreadyImpossible,
    ConductorUndefined,
    NoneFound,
    NoTwistExists,
    OutOfScope,
    SearchExhausted,
)
from src.utils.logger import setup_logger

logger = setup_logger()


class CharacterService:
    """Service for ray class characters"""

    def __init__(self):
        self._conductors: Dict[Character, Ideal] = {}
        self._support_kernels: Dict[Tuple[Ideal, Ideal], Subgroup] = {}

    # Dual group

    def dual_group(self, group: RayClassGroup) -> List[Character]:
        """All characters in lexicographic exponent order"""
        return list(self.iter_dual_group(group))

    def iter_dual_group(self, group: RayClassGroup) -> Iterator[Character]:
        for exponents in product(*(range(d) for d in group.snf)):
            yield Character(group, exponents)

    def principal(self, group: RayClassGroup) -> Character:
        return Character(group, tuple(0 for _ in group.snf))

    def character_sum(self, chi: Character) -> Fraction:
        """
        Exact sum over the group of chi(C)

        For a nonprincipal chi the multiset of exponents is checked to be
        stable under translation by a nonzero value chi(g), which forces
        the sum to vanish.
        """
        values = Counter(chi.exponent(c) for c in chi.group.classes)
        shift = next((v for v in values if v != 0), None)
        if shift is None:
            return Fraction(chi.group.order)
        shifted = Counter({(v + shift) % 1: k for v, k in values.items()})
        if shifted != values:
            raise ArithmeticError(f"exponents of {chi} are not translation stable")
        return Fraction(0)

    # Conductors

    def trivial_on_kernel(self, chi: Character, target: Ideal) -> bool:
        """chi factors through Cl(target)"""
        group = chi.group
        if target == group.modulus:
            return True
        kernel = rayclass_service.subgroup_level(group, target)
        return chi.is_trivial_on(kernel)

    def conductor(self, chi: Character) -> Ideal:
        """
        Conductor of chi by a scan of the divisor lattice of the modulus

        Args:
            chi: Character of Cl(m)

        Returns:
            Least divisor f of m such that chi factors through Cl(f)

        Raises:
            ConductorUndefined: If the candidate divisors have no least element
        """
        if chi in self._conductors:
            return self._conductors[chi]
        group = chi.group
        candidates = [
            divisor for divisor in quadfield_service.ideal_divisors(group.modulus)
            if self.trivial_on_kernel(chi, divisor)
        ]
        conductor = min(candidates, key=lambda ideal: ideal.sort_key())
        if not all(conductor.divides(candidate) for candidate in candidates):
            logger.error(f"Conductor candidates of {chi} have no least element")
            raise ConductorUndefined(f"no least divisor for {chi}")
        self._conductors[chi] = conductor
        return conductor

    def _support_kernel(self, group: RayClassGroup, prime: Ideal, exponent: int) -> Subgroup:
        """ker(Cl(m) -> Cl(m * p^-v)) for p^v || m"""
        cache_key = (group.modulus, prime)
        if cache_key not in self._support_kernels:
            target = group.modulus * prime.inverse() ** exponent
            self._support_kernels[cache_key] = rayclass_service.subgroup_level(group, target)
        return self._support_kernels[cache_key]

    def prime_divides_conductor(self, chi: Character, prime: Ideal) -> bool:
        """
        p | f_chi iff chi is nontrivial on ker(Cl(m) -> Cl(m * p^-v))

        Args:
            chi: Character of Cl(m)
            prime: Prime ideal dividing m

        Returns:
            bool
        """
        factors = dict(quadfield_service.factor_ideal(chi.group.modulus))
        if prime not in factors:
            return False
        return not chi.is_trivial_on(self._support_kernel(chi.group, prime, factors[prime]))

    def conductor_support(self, chi: Character) -> List[Ideal]:
        return [
            prime for prime, _ in quadfield_service.factor_ideal(chi.group.modulus)
            if self.prime_divides_conductor(chi, prime)
        ]

    # Descent and pullback

    def primitive_descent(self, chi: Character) -> Character:
        """
        The primitive character chi_0 on Cl(f_chi) with chi = chi_0 o projection

        Args:
            chi: Character of Cl(m)

        Returns:
            Character of Cl(f_chi)
        """
        group = chi.group
        conductor = self.conductor(chi)
        if conductor == group.modulus:
            return chi
        target = rayclass_service.ray_class_group(group.field, conductor)
        preimages: Dict[Tuple[int, ...], RayClass] = {}
        for c in group.classes:
            preimages.setdefault(rayclass_service.project(group, target, c).vector, c)
        exponents = []
        for index, d in enumerate(target.snf):
            value = chi.exponent(preimages[target.basis_class(index).vector])
            exponents.append(int(value * d) % d)
        primitive = Character(target, tuple(exponents))
        self._conductors.setdefault(primitive, conductor)
        return primitive

    def pullback(self, chi: Character, group: RayClassGroup) -> Character:
        """chi o (Cl(m) -> Cl(m')) for a character chi of Cl(m')"""
        exponents = []
        for index, d in enumerate(group.snf):
            image = rayclass_service.project(group, chi.group, group.basis_class(index))
            exponents.append(int(chi.exponent(image) * d) % d)
        return Character(group, tuple(exponents))

    # Gauss sums

    def choose_gamma(self, field: Field, conductor: Ideal, skip: int = 0) -> FieldElement:
        """
        Find gamma with gamma * d_K * f integral and coprime to f

        Integral ideals a coprime to f are scanned by norm; when
        a * conj(d_K f) = (beta) is principal, gamma = beta / N(d_K f).

        Args:
            field: Field
            conductor: Nontrivial integral ideal f
            skip: Number of valid candidates to pass over

        Returns:
            FieldElement gamma

        Raises:
            SearchExhausted: If the norm cap passes GAMMA_SEARCH_CAP
        """
        if conductor.is_unit():
            raise OutOfScope("choose_gamma needs a nontrivial conductor")
        twisted = quadfield_service.different(field) * conductor
        twisted_conj = twisted.conjugate()
        twisted_norm = twisted.norm()
        cap = settings.IDEAL_SEARCH_START
        for ideal in quadfield_service.iter_integral_ideals(field, coprime_to=conductor):
            while ideal.norm() > cap:
                cap *= 2
                if cap > settings.GAMMA_SEARCH_CAP:
                    logger.error(f"No gamma for {conductor} below norm {settings.GAMMA_SEARCH_CAP}")
                    raise SearchExhausted(f"no gamma for conductor {conductor}")
                logger.warning(f"gamma search for {conductor} raised its norm cap to {cap}")
            beta = quadfield_service.is_principal_with_generator(ideal * twisted_conj)
            if beta is None:
                continue
            if skip == 0:
                gamma = beta / twisted_norm
                logger.debug(f"gamma = {gamma} via {ideal}")
                return gamma
            skip -= 1

    def is_valid_gamma(self, gamma: FieldElement, conductor: Ideal) -> bool:
        """gamma * d_K * f is integral and coprime to f"""
        field = gamma.field
        ideal = Ideal.principal(gamma) * quadfield_service.different(field) * conductor
        return ideal.is_integral() and quadfield_service.is_coprime(ideal, conductor)

    def gauss_sum(self, gamma: FieldElement, chi0: Character, ctx: PrecisionContext) -> mpmath.mpc:
        """
        T_gamma(conj chi0) = sum over (O_K/f)^* of conj chi0([alpha]) e^{2 pi i Tr(alpha gamma)}

        Args:
            gamma: Element from choose_gamma
            chi0: Primitive character on Cl(f)
            ctx: Precision context

        Returns:
            mpc at working precision
        """
        group = chi0.group
        field = group.field
        total = mpmath.mpc(0)
        with ctx.workdps():
            for x, y in quadfield_service.unit_residues(group.modulus):
                alpha = field.element(x, y)
                ray_class = rayclass_service.class_of_element(group, alpha)
                phase = ((alpha * gamma).trace() - chi0.exponent(ray_class)) % 1
                total += mpmath.expjpi(2 * mpmath.mpf(phase.numerator) / phase.denominator)
        return total

    # Searched characters

    def find_char_A(self, group: RayClassGroup, target: RayClass) -> Character:
        """
        First character trivial on {C_t}, nontrivial at target, with every
        prime of (N) dividing its conductor

        Args:
            group: Cl(N)
            target: Class in Cl(K_(N)/H) outside Cl(K_(N)/H_N)

        Returns:
            Character

        Raises:
            OutOfScope: If gcd(72, N) is not 1, 8, 9 or 72, or target is not in
                Cl(K_(N)/H) outside Cl(K_(N)/H_N)
            NoneFound: If the scan finds nothing
        """
        N = group.level
        if N is None or math.gcd(72, N) not in CHARACTER_A_GCDS:
            raise OutOfScope(f"find_char_A needs gcd(72, N) in {sorted(CHARACTER_A_GCDS)}")
        ring = rayclass_service.subgroup_ring(group)
        if not rayclass_service.subgroup_hilbert(group).contains(target) or ring.contains(target):
            raise OutOfScope(f"find_char_A target {target} is not in Cl(K_(N)/H) minus Cl(K_(N)/H_N)")
        primes = [prime for prime, _ in quadfield_service.factor_ideal(group.modulus)]
        for chi in self.iter_dual_group(group):
            if not chi.is_trivial_on(ring) or chi.is_one_at(target):
                continue
            if all(self.prime_divides_conductor(chi, prime) for prime in primes):
                logger.info(f"find_char_A: {chi}")
                return chi
        logger.error(f"find_char_A found no character for N={N} at {target}")
        raise NoneFound(f"no character with (A1)-(A3) at {target}")

    def find_char_p(self, group: RayClassGroup, p: int, e: int) -> Character:
        """
        First character trivial on the preimage of Cl(K_(p^e)/H_(p^e)) with
        every prime above p dividing its conductor

        Args:
            group: Cl(N)
            p: Prime with p^e || N
            e: Exponent

        Returns:
            Character
        """
        N = group.level
        field = group.field
        if N is None or N % p ** e or N % p ** (e + 1) == 0:
            raise OutOfScope(f"{p}^{e} does not exactly divide N")
        if p == 2 and e == 1 and quadfield_service.kronecker_symbol(field.d, 2) == 1:
            raise OutOfScope("2 || N with 2 split in K")
        local = rayclass_service.rational_group(field, p ** e)
        fixed = rayclass_service.preimage(group, local, rayclass_service.subgroup_ring(local))
        primes = [prime for prime, _ in quadfield_service.factor_rational_prime(field, p)]
        for chi in self.iter_dual_group(group):
            if not chi.is_trivial_on(fixed):
                continue
            if all(self.prime_divides_conductor(chi, prime) for prime in primes):
                logger.info(f"find_char_p({p}^{e}): {chi}")
                return chi
        logger.error(f"find_char_p found no character for p={p}, e={e}")
        raise NoneFound(f"no character for {p}^{e}")

    def product_of_local_characters(self, group: RayClassGroup) -> Character:
        """prod over p^e || N of find_char_p"""
        chi = self.principal(group)
        for p, e in sorted(factorint(group.level).items()):
            chi = chi * self.find_char_p(group, p, e)
        return chi

    def twist_nontrivial_on(self, chi: Character, subgroup: Subgroup) -> Character:
        """
        chi itself when nontrivial on the subgroup, else chi * rho for the
        first class group character rho nontrivial on it

        Raises:
            AlreadyImpossible: If the subgroup is trivial
            NoTwistExists: If no class group character helps
        """
        if subgroup.is_trivial():
            raise AlreadyImpossible("no character is nontrivial on the trivial subgroup")
        if not chi.is_trivial_on(subgroup):
            return chi
        class_group = rayclass_service.class_group(chi.group.field)
        for rho in self.iter_dual_group(class_group):
            lifted = self.pullback(rho, chi.group)
            if not lifted.is_trivial_on(subgroup):
                return chi * lifted
        raise NoTwistExists("every class group character is trivial on the subgroup")


# Singleton instance
character_service = CharacterService()

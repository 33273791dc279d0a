"""
Ray Class Service
Builds Cl(O_K) and ray class groups Cl(m) as explicit finite abelian groups,
the distinguished classes C_t and the subgroups attached to H, H_N and K_(M)
"""

from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Tuple
import math

import numpy as np
from sympy import divisors, primefactors

from src.config.settings import settings
from src.models.field import Field, FieldElement
from src.models.ideal import Ideal
from src.models.rayclass import RayClass, RayClassGroup, Subgroup, Vector
from src.services.quadfield_service import Residue, quadfield_service
from src.utils.arith import smith_normal_form
from src.utils.exceptions import NotCoprime, NotDivisor, SearchExhausted
from src.utils.logger import setup_logger

logger = setup_logger()

Key = Tuple[int, Residue]


class RayClassKeys:
    """
    Exact class keys for Cl(m)

    A class is keyed by (index of its ideal class, unit orbit of a residue
    in (O_K/m)^*). Every ideal class c has a fixed representative r_c of
    norm prime to m, with r_c = O_K for the principal class; an ideal a in
    class c satisfies a*conj(r_c) = (gamma) and is keyed by the orbit of
    gamma / N(r_c) modulo m.
    """

    def __init__(self, field: Field, modulus: Ideal):
        self.field = field
        self.modulus = modulus
        self.least = modulus.a
        self.forms = quadfield_service.reduced_forms(field.d)
        self.form_index = {form: i for i, form in enumerate(self.forms)}
        self.units = field.unit_coords()
        self.class_reps: List[Ideal] = []
        self.norm_inverses: List[int] = []
        self._product_cache: Dict[Tuple[int, int], Tuple[int, Residue]] = {}
        self._find_class_representatives()

    def _find_class_representatives(self) -> None:
        found: Dict[int, Ideal] = {}
        for ideal in quadfield_service.iter_integral_ideals(self.field):
            if math.gcd(int(ideal.norm()), self.least) != 1:
                continue
            index = self.form_index[quadfield_service.form_of_ideal(ideal)]
            found.setdefault(index, ideal)
            if len(found) == len(self.forms):
                break
        self.class_reps = [found[i] for i in range(len(self.forms))]
        self.norm_inverses = [
            pow(int(rep.norm()), -1, self.least) if self.least > 1 else 0
            for rep in self.class_reps
        ]

    def orbit(self, residue: Residue) -> Residue:
        """Least residue in the orbit under multiplication by roots of unity"""
        return min(quadfield_service.mul_residues(self.modulus, unit, residue) for unit in self.units)

    def class_index(self, ideal: Ideal) -> int:
        return self.form_index[quadfield_service.form_of_ideal(ideal)]

    def _scaled_residue(self, generator: FieldElement, index: int) -> Residue:
        inv = self.norm_inverses[index]
        return quadfield_service.residue(
            self.modulus, int(generator.x) * inv, int(generator.y) * inv
        )

    def of_ideal(self, ideal: Ideal) -> Key:
        if not ideal.is_integral() or not quadfield_service.is_coprime(ideal, self.modulus):
            raise NotCoprime(f"{ideal} is not an integral ideal coprime to {self.modulus}")
        index = self.class_index(ideal)
        generator = quadfield_service.is_principal_with_generator(ideal * self.class_reps[index].conjugate())
        return index, self.orbit(self._scaled_residue(generator, index))

    def of_element(self, element: FieldElement) -> Key:
        """Key of the principal ideal (alpha) for alpha prime to m"""
        x, y = int(element.x), int(element.y)
        if not quadfield_service.is_unit_mod(self.modulus, x, y):
            raise NotCoprime(f"{element} is not prime to {self.modulus}")
        return 0, self.orbit(quadfield_service.residue(self.modulus, x, y))

    @property
    def identity(self) -> Key:
        return 0, self.orbit((1, 0))

    def multiply(self, left: Key, right: Key) -> Key:
        c1, rho1 = left
        c2, rho2 = right
        if (c1, c2) not in self._product_cache:
            reps = self.class_reps
            pair = reps[c1] * reps[c2]
            c3 = self.class_index(pair)
            delta = quadfield_service.is_principal_with_generator(pair * reps[c3].conjugate())
            self._product_cache[(c1, c2)] = (c3, self._scaled_residue(delta, c3))
        c3, twist = self._product_cache[(c1, c2)]
        rho = quadfield_service.mul_residues(self.modulus, rho1, rho2)
        return c3, self.orbit(quadfield_service.mul_residues(self.modulus, rho, twist))


class RayClassService:
    """Service for ray class groups and their subgroups"""

    def __init__(self):
        self._groups: Dict[Tuple[int, Ideal], RayClassGroup] = {}
        self._keys: Dict[Tuple[int, Ideal], RayClassKeys] = {}
        self._projections: Dict[Tuple[Ideal, Ideal], List[Vector]] = {}

    # Orders and degrees

    def expected_order(self, field: Field, modulus: Ideal) -> int:
        """h_K * Phi(m) * omega(m) / unit_count"""
        h = quadfield_service.class_number(field)
        phi = quadfield_service.phi(modulus)
        omega = quadfield_service.unit_count_mod(field, modulus)
        return h * phi * omega // field.unit_count

    def degree_KN_over_H(self, field: Field, N: int) -> int:
        """[K_(N) : H] = Phi((N)) * omega(N) / unit_count"""
        modulus = Ideal.rational(field, N)
        phi = quadfield_service.phi(modulus)
        return phi * quadfield_service.unit_count_mod(field, modulus) // field.unit_count

    def degree_ring_over_H(self, field: Field, N: int) -> int:
        """[H_N : H] = N * prod over p | N of (1 - (d_K/p)/p)"""
        value = Fraction(N)
        for p in primefactors(N):
            value *= 1 - Fraction(quadfield_service.kronecker_symbol(field.d, p), p)
        return int(value)

    def collapses_to_half(self, field: Field, N: int) -> bool:
        """True iff 2 || N and 2 splits in K"""
        return N % 2 == 0 and N % 4 != 0 and quadfield_service.kronecker_symbol(field.d, 2) == 1

    def collapsing_divisors(self, field: Field, N: int) -> List[int]:
        """Proper divisors M of N with |Cl(M)| = |Cl(N)|"""
        target = self.expected_order(field, Ideal.rational(field, N))
        return [
            M for M in divisors(N)[:-1]
            if self.expected_order(field, Ideal.rational(field, M)) == target
        ]

    # Construction

    def keys(self, field: Field, modulus: Ideal) -> RayClassKeys:
        cache_key = (field.d, modulus)
        if cache_key not in self._keys:
            self._keys[cache_key] = RayClassKeys(field, modulus)
        return self._keys[cache_key]

    def class_group(self, field: Field) -> RayClassGroup:
        """Cl(O_K), the ray class group of the trivial modulus"""
        return self.ray_class_group(field, Ideal.unit(field))

    def ray_class_group(self, field: Field, modulus: Ideal) -> RayClassGroup:
        """
        Build Cl(m) from small prime ideal generators

        Prime ideals coprime to m are added in (norm, HNF) order; each new
        generator contributes one triangular relation, found by closing the
        subgroup generated so far. The norm bound doubles until the
        generated subgroup reaches h_K * Phi(m) * omega(m) / unit_count.

        Args:
            field: Field
            modulus: Integral nonzero ideal

        Returns:
            RayClassGroup with Smith normal form and discrete log
        """
        quadfield_service._require_nonzero(modulus)
        cache_key = (field.d, modulus)
        if cache_key in self._groups:
            return self._groups[cache_key]

        keys = self.keys(field, modulus)
        expected = self.expected_order(field, modulus)
        elements: Dict[Hashable, Tuple[int, ...]] = {keys.identity: ()}
        generators: List[Ideal] = []
        relations: List[List[int]] = []

        bound, previous = settings.IDEAL_SEARCH_START, 0
        while len(elements) < expected:
            for prime in quadfield_service.prime_ideals_up_to(field, bound):
                if prime.norm() <= previous or not quadfield_service.is_coprime(prime, modulus):
                    continue
                if len(elements) == expected:
                    break
                g = keys.of_ideal(prime)
                if g in elements:
                    continue
                power, e = g, 1
                while power not in elements:
                    power = keys.multiply(power, g)
                    e += 1
                relations.append([-x for x in elements[power]] + [e])
                elements = self._extend(keys, elements, g, e)
                generators.append(prime)
                logger.debug(f"Generator {prime} of order {e} mod subgroup, size {len(elements)}")
            if len(elements) < expected:
                previous, bound = bound, 2 * bound
                logger.warning(f"Generators up to norm {previous} span {len(elements)} of {expected}, raising bound to {bound}")

        group = self._presentation(field, modulus, keys, elements, generators, relations)
        self._groups[cache_key] = group
        logger.info(f"Built {group} (order {group.order}, {len(generators)} generators)")
        return group

    def _extend(self, keys: RayClassKeys, elements: Dict, g: Key, e: int) -> Dict:
        extended = {key: vector + (0,) for key, vector in elements.items()}
        g_power = g
        for j in range(1, e):
            for key, vector in elements.items():
                extended[keys.multiply(key, g_power)] = vector + (j,)
            g_power = keys.multiply(g_power, g)
        return extended

    def _presentation(self, field, modulus, keys, elements, generators, relations) -> RayClassGroup:
        k = len(generators)
        if k == 0:
            return RayClassGroup(field, modulus, [], (), keys.of_ideal, {key: () for key in elements})
        matrix = [row + [0] * (k - len(row)) for row in relations]
        _, D, V = smith_normal_form(matrix)
        diagonal = [int(D[i, i]) for i in range(k)]
        kept = [i for i, d in enumerate(diagonal) if d > 1]
        snf = tuple(diagonal[i] for i in kept)
        key_to_vector = {}
        for key, vector in elements.items():
            coords = np.array(vector, dtype=object).dot(V)
            key_to_vector[key] = tuple(int(coords[i]) % diagonal[i] for i in kept)
        return RayClassGroup(field, modulus, generators, snf, keys.of_ideal, key_to_vector)

    # Classes

    def class_of(self, group: RayClassGroup, ideal: Ideal) -> RayClass:
        """Discrete log of an ideal coprime to the modulus"""
        return group.class_of(ideal)

    def class_of_element(self, group: RayClassGroup, element: FieldElement) -> RayClass:
        key = self.keys(group.field, group.modulus).of_element(element)
        return RayClass(group, group.key_to_vector[key])

    def c_t(self, group: RayClassGroup, t: int) -> RayClass:
        """The class C_t of the principal ideal (t) in Cl(N)"""
        N = group.level
        if N is None:
            raise NotDivisor(f"{group.modulus} is not a rational modulus")
        if math.gcd(N, t) != 1:
            raise NotCoprime(f"gcd({N}, {t}) != 1")
        return self.class_of_element(group, group.field.element(t % N))

    def representatives(self, group: RayClassGroup) -> Dict[Vector, Ideal]:
        """Least-norm integral representative coprime to the modulus for every class"""
        if len(group.representatives) < group.order:
            for ideal in quadfield_service.iter_integral_ideals(group.field, coprime_to=group.modulus):
                group.representatives.setdefault(group.log(ideal), ideal)
                if len(group.representatives) == group.order:
                    break
        return group.representatives

    def representative(self, group: RayClassGroup, ray_class: RayClass) -> Ideal:
        return self.representatives(group)[ray_class.vector]

    def alternative_representative(self, group: RayClassGroup, ray_class: RayClass, skip: int = 1) -> Ideal:
        """
        The (skip+1)-th least-norm representative of a class

        Raises:
            SearchExhausted: If the norm passes REPRESENTATIVE_SEARCH_CAP
        """
        seen = 0
        for ideal in quadfield_service.iter_integral_ideals(group.field, coprime_to=group.modulus):
            if ideal.norm() > settings.REPRESENTATIVE_SEARCH_CAP:
                logger.error(f"No representative number {skip + 1} of {ray_class} below norm {settings.REPRESENTATIVE_SEARCH_CAP}")
                raise SearchExhausted(f"no alternative representative of {ray_class}")
            if group.log(ideal) == ray_class.vector:
                if seen == skip:
                    return ideal
                seen += 1

    # Maps between levels

    def divides(self, inner: Ideal, outer: Ideal) -> bool:
        return inner.divides(outer)

    def projection_images(self, source: RayClassGroup, target: RayClassGroup) -> List[Vector]:
        """Images in Cl(m') of the basis classes of Cl(m), m' | m"""
        if not target.modulus.divides(source.modulus):
            raise NotDivisor(f"{target.modulus} does not divide {source.modulus}")
        cache_key = (source.modulus, target.modulus)
        if cache_key not in self._projections:
            images = []
            for index in range(source.rank):
                ideal = self.representative(source, source.basis_class(index))
                images.append(target.log(ideal))
            self._projections[cache_key] = images
        return self._projections[cache_key]

    def project(self, source: RayClassGroup, target: RayClassGroup, ray_class: RayClass) -> RayClass:
        images = self.projection_images(source, target)
        total = [0] * target.rank
        for coefficient, image in zip(ray_class.vector, images):
            total = [t + coefficient * x for t, x in zip(total, image)]
        return RayClass(target, target.reduce(total))

    def kernel(self, source: RayClassGroup, target: RayClassGroup) -> Subgroup:
        """ker(Cl(m) -> Cl(m'))"""
        members = frozenset(
            c.vector for c in source.classes if self.project(source, target, c).is_identity()
        )
        return Subgroup(source, members)

    def preimage(self, source: RayClassGroup, target: RayClassGroup, subgroup: Subgroup) -> Subgroup:
        members = frozenset(
            c.vector for c in source.classes if subgroup.contains(self.project(source, target, c))
        )
        return Subgroup(source, members)

    # Subgroups

    def subgroup_hilbert(self, group: RayClassGroup) -> Subgroup:
        """Cl(K_(m)/H): kernel of the map to Cl(O_K)"""
        return self.kernel(group, self.class_group(group.field))

    def subgroup_ring(self, group: RayClassGroup) -> Subgroup:
        """Cl(K_(N)/H_N) = {C_t : t in (Z/N)^*}"""
        N = group.level
        members = frozenset(self.c_t(group, t).vector for t in range(1, N + 1) if math.gcd(t, N) == 1)
        return Subgroup(group, members)

    def subgroup_level(self, group: RayClassGroup, target: Ideal) -> Subgroup:
        """Cl(K_(m)/K_(m')): kernel of the map to Cl(m')"""
        if not target.divides(group.modulus):
            raise NotDivisor(f"{target} does not divide {group.modulus}")
        return self.kernel(group, self.ray_class_group(group.field, target))

    def ring_class_map(self, group: RayClassGroup) -> Tuple[Dict[int, RayClass], List[int]]:
        """
        The map t -> C_t on (Z/N)^* and its kernel

        Returns:
            Tuple of ({t: C_t}, sorted kernel residues)
        """
        N = group.level
        images = {t: self.c_t(group, t) for t in range(1, N + 1) if math.gcd(t, N) == 1}
        kernel = sorted(t % N for t, image in images.items() if image.is_identity())
        return images, kernel

    def distinguished_class(self, group: RayClassGroup, divisor: int) -> RayClass:
        """Class of the principal ideal ((N/divisor)*tau_K + 1)"""
        N = group.level
        return self.class_of_element(group, group.field.element(1, N // divisor))

    def rational_group(self, field: Field, N: int) -> RayClassGroup:
        return self.ray_class_group(field, Ideal.rational(field, N))

    def level_divisor_groups(self, field: Field, N: int) -> Dict[int, RayClassGroup]:
        """Cl(M) for every divisor M of N"""
        return {M: self.rational_group(field, M) for M in divisors(N)}


# Singleton instance
rayclass_service = RayClassService()

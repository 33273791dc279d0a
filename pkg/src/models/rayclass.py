"""
Ray Class Models
Finite abelian presentations of Cl(m), their elements and subgroups
"""

from dataclasses import dataclass, field as dataclass_field
from itertools import product
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Optional, Tuple

from src.models.field import Field
from src.models.ideal import Ideal

Vector = Tuple[int, ...]


@dataclass
class RayClassGroup:
    """
    Cl(modulus) in Smith normal form

    Classes are exponent vectors reduced modulo the elementary divisors
    snf = (d_1, d_2, ...) with d_i | d_{i+1}. The discrete log of an ideal
    goes through an exact class key computed by the ray class service.
    """

    field: Field
    modulus: Ideal
    generators: List[Ideal]
    snf: Tuple[int, ...]
    key_of: Callable[[Ideal], Hashable] = dataclass_field(repr=False)
    key_to_vector: Dict[Hashable, Vector] = dataclass_field(repr=False)
    representatives: Dict[Vector, Ideal] = dataclass_field(default_factory=dict, repr=False)

    @property
    def order(self) -> int:
        total = 1
        for d in self.snf:
            total *= d
        return total

    @property
    def rank(self) -> int:
        return len(self.snf)

    @property
    def identity(self) -> "RayClass":
        return RayClass(self, tuple(0 for _ in self.snf))

    @property
    def classes(self) -> List["RayClass"]:
        """All classes in lexicographic exponent order"""
        return [RayClass(self, vector) for vector in product(*(range(d) for d in self.snf))]

    def reduce(self, vector: Iterable[int]) -> Vector:
        return tuple(int(x) % d for x, d in zip(vector, self.snf))

    def log(self, ideal: Ideal) -> Vector:
        """Discrete log of an integral ideal coprime to the modulus"""
        return self.key_to_vector[self.key_of(ideal)]

    def class_of(self, ideal: Ideal) -> "RayClass":
        return RayClass(self, self.log(ideal))

    def representative(self, ray_class: "RayClass") -> Ideal:
        return self.representatives[ray_class.vector]

    def basis_class(self, index: int) -> "RayClass":
        vector = [0] * self.rank
        vector[index] = 1
        return RayClass(self, self.reduce(vector))

    @property
    def level(self) -> Optional[int]:
        """N when the modulus is the rational ideal (N)"""
        m = self.modulus
        if m.denominator == 1 and m.b == 0 and m.a == m.c:
            return m.a
        return None

    def __str__(self) -> str:
        factors = " x ".join(f"Z/{d}" for d in self.snf) or "1"
        return f"Cl({self.modulus}) = {factors}"


@dataclass(frozen=True, eq=False)
class RayClass:
    """Element of a ray class group as a reduced exponent vector"""

    group: RayClassGroup
    vector: Vector

    def __eq__(self, other) -> bool:
        if not isinstance(other, RayClass):
            return NotImplemented
        return self.group.modulus == other.group.modulus and self.vector == other.vector

    def __hash__(self) -> int:
        return hash((self.group.modulus, self.vector))

    def __mul__(self, other: "RayClass") -> "RayClass":
        return RayClass(self.group, self.group.reduce(x + y for x, y in zip(self.vector, other.vector)))

    def __pow__(self, exponent: int) -> "RayClass":
        return RayClass(self.group, self.group.reduce(exponent * x for x in self.vector))

    def inverse(self) -> "RayClass":
        return self ** -1

    def is_identity(self) -> bool:
        return not any(self.vector)

    def order(self) -> int:
        k, current = 1, self
        while not current.is_identity():
            current = current * self
            k += 1
        return k

    def __str__(self) -> str:
        return str(list(self.vector))


@dataclass(frozen=True)
class Subgroup:
    """Subgroup of a ray class group given by its member vectors"""

    group: RayClassGroup = dataclass_field(compare=False, repr=False)
    members: FrozenSet[Vector]

    @classmethod
    def generated_by(cls, group: RayClassGroup, generators: Iterable[RayClass]) -> "Subgroup":
        """Closure of the identity under multiplication by the generators"""
        seen = {group.identity.vector}
        frontier = [group.identity]
        gens = list(generators)
        while frontier:
            current = frontier.pop()
            for g in gens:
                nxt = current * g
                if nxt.vector not in seen:
                    seen.add(nxt.vector)
                    frontier.append(nxt)
        return cls(group, frozenset(seen))

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def elements(self) -> List[RayClass]:
        return [RayClass(self.group, vector) for vector in sorted(self.members)]

    def contains(self, ray_class: RayClass) -> bool:
        return ray_class.vector in self.members

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_closed(self) -> bool:
        """Identity membership and closure under the group law"""
        if self.group.identity.vector not in self.members:
            return False
        elements = self.elements
        return all((x * y).vector in self.members for x in elements for y in elements)

    def intersection(self, other: "Subgroup") -> "Subgroup":
        return Subgroup(self.group, self.members & other.members)

    def is_subset(self, other: "Subgroup") -> bool:
        return self.members <= other.members

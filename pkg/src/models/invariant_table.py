"""
Invariant Table Model
Fricke and Siegel-Ramachandra invariants over a full ray class group
"""

from dataclasses import dataclass, field as dataclass_field
from typing import Dict, List

import mpmath

from src.models.ideal import Ideal
from src.models.precision import PrecisionContext, TorsionVector
from src.models.rayclass import RayClass, RayClassGroup, Vector


@dataclass(frozen=True)
class InvariantEntry:
    """Values attached to one ray class"""

    ray_class: RayClass
    representative: Ideal
    index: TorsionVector
    fricke_value: mpmath.mpc
    log_abs_siegel: mpmath.mpf


@dataclass
class InvariantTable:
    """
    One entry per class of Cl(modulus)

    The Galois action of C' is the index translation C -> C*C'.
    """

    group: RayClassGroup
    ctx: PrecisionContext
    entries: Dict[Vector, InvariantEntry] = dataclass_field(default_factory=dict)

    @property
    def modulus(self) -> Ideal:
        return self.group.modulus

    def __len__(self) -> int:
        return len(self.entries)

    def entry(self, ray_class: RayClass) -> InvariantEntry:
        return self.entries[ray_class.vector]

    def fricke_value(self, ray_class: RayClass) -> mpmath.mpc:
        return self.entries[ray_class.vector].fricke_value

    def log_abs_siegel(self, ray_class: RayClass) -> mpmath.mpf:
        return self.entries[ray_class.vector].log_abs_siegel

    def ordered_entries(self) -> List[InvariantEntry]:
        return [self.entries[vector] for vector in sorted(self.entries)]

    def translated(self, shift: RayClass) -> List[mpmath.mpc]:
        """Fricke values of C*shift in the class order of C"""
        return [self.fricke_value(entry.ray_class * shift) for entry in self.ordered_entries()]

"""
Ray Class Schemas - Pydantic V2
"""

from pydantic import BaseModel
from typing import Dict, List, Optional


class LevelSubgroup(BaseModel):
    """Cl(K_(N)/K_(M)) for a divisor M of N"""
    M: int
    order: int
    cl_M_order: int


class DegreeCheck(BaseModel):
    """Degree formula against enumeration"""
    name: str
    formula: int
    enumerated: int
    passed: bool


class RayClassReport(BaseModel):
    """Ray class group summary printed by `rayclass`"""
    d_K: int
    N: int
    order: int
    snf: List[int]
    generators: List[str]
    class_number: int
    hilbert_subgroup_order: int
    ring_subgroup_order: int
    level_subgroups: List[LevelSubgroup]
    ring_class_kernel: List[int]
    degree_KN_over_H: int
    degree_ring_over_H: int
    collapses_to_half: bool
    collapsing_divisors: List[int]
    checks: Optional[List[DegreeCheck]] = None

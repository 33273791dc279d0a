"""
Field Schemas - Pydantic V2
"""

from pydantic import BaseModel, Field
from typing import Dict, List, Optional


class PrimeSplitting(BaseModel):
    """Decomposition of a rational prime"""
    p: int
    kronecker: int = Field(ge=-1, le=1)
    kind: str
    ideals: List[str]
    exponents: List[int]


class FieldInfo(BaseModel):
    """Field summary printed by `field`"""
    d_K: int
    tau_K: Dict[str, str]
    unit_count: int
    class_number: int
    class_group: List[int]
    reduced_forms: List[List[int]]
    different_norm: int
    j_tau_K: Optional[Dict[str, str]] = None
    splitting: List[PrimeSplitting]

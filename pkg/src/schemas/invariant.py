"""
Invariant Table Schemas - Pydantic V2
"""

from pydantic import BaseModel
from typing import Dict, List


class InvariantRow(BaseModel):
    """One class of an invariant table"""
    ray_class: List[int]
    representative: str
    index: List[str]
    fricke_value: Dict[str, str]
    log_abs_siegel: str


class InvariantTableExport(BaseModel):
    """Exported invariant table"""
    d_K: int
    modulus: str
    snf: List[int]
    digits: int
    rows: List[InvariantRow]

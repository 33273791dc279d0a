"""
Report Schemas - Pydantic V2
Run configuration, per-check results and the versioned report envelope
"""

from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Any, Dict, List, Optional
from enum import Enum

from src.config.constants import REPORT_SCHEMA_VERSION


class SuiteEnum(str, Enum):
    """Verification suites"""
    fricke_siegel = "fricke-siegel"
    kronecker = "kronecker"
    decomposition = "decomposition"
    case_constants = "case-constants"
    table1 = "table1"
    main = "main"


class OutputFormatEnum(str, Enum):
    """Table output formats"""
    json = "json"
    csv = "csv"


class RunConfig(BaseModel):
    """Inputs of one CLI run, recorded in every report"""
    command: str
    d_K: Optional[List[int]] = None
    N: Optional[List[int]] = None
    digits: int = Field(ge=30, description="Working decimal digits")
    guard: int = Field(ge=10, description="Guard digits")
    cutoff: Optional[int] = Field(None, gt=0)
    seed: int
    samples: Optional[int] = Field(None, gt=0)
    max_n: Optional[int] = Field(None, gt=0)
    output_format: OutputFormatEnum = OutputFormatEnum.json
    threads: int = Field(1, ge=1)

    @field_validator("d_K", "N")
    @classmethod
    def check_nonempty(cls, value):
        """Ranges must not be empty"""
        if value is not None and len(value) == 0:
            raise ValueError("range must be nonempty")
        return value


class PrecisionInfo(BaseModel):
    """Precision metadata of a run"""
    digits: int
    guard: int
    max_escalations: int
    cutoff: Optional[int] = None


class CheckResult(BaseModel):
    """One measured residual or ratio"""
    name: str
    inputs: Dict[str, Any] = Field(default_factory=dict)
    values: Dict[str, Any] = Field(default_factory=dict)
    residual: Optional[str] = None
    tolerance: Optional[str] = None
    passed: bool = Field(alias="pass")
    indeterminate: bool = False

    model_config = {"populate_by_name": True}


class Report(BaseModel):
    """Versioned report envelope"""
    schema_version: int = Field(REPORT_SCHEMA_VERSION, alias="schema")
    command: str
    config: RunConfig
    results: List[CheckResult] = Field(default_factory=list)
    precision: Optional[PrecisionInfo] = None
    timing: Optional[Dict[str, float]] = None

    model_config = {"populate_by_name": True}

    @model_validator(mode="after")
    def check_command(self):
        """The envelope command matches the recorded config"""
        if self.command != self.config.command:
            raise ValueError("report command differs from config command")
        return self

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def indeterminate(self) -> bool:
        return any(result.indeterminate for result in self.results)

    def to_document(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True)

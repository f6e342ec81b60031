"""Request and response models for the analysis service.

Every report shares a header: schema version, the command that produced
it, a content digest of the input kernel, the tolerances in effect and
an overall pass flag.  Residual fields are always present; pass flags
are derived from them at construction time, never stored independently.
"""

from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import Tolerances
from ..lagrangian import LagrangianSpec
from ..minplus import CostKernel

REPORT_VERSION = 1


class ToleranceParams(BaseModel):
    eps_num: float = Field(default=1e-9, ge=0)
    eps_aubry: float = Field(default=1e-7, ge=0)
    eps_dual: float = Field(default=1e-7, ge=0)
    eps_mass: float = Field(default=1e-12, ge=0)

    def to_tolerances(self) -> Tolerances:
        return Tolerances(
            eps_num=self.eps_num,
            eps_aubry=self.eps_aubry,
            eps_dual=self.eps_dual,
            eps_mass=self.eps_mass,
        )


class KernelPayload(BaseModel):
    """Inline cost kernel: labels, dense matrix, optional coordinates."""

    labels: list[str]
    matrix: list[list[float]]
    coords: list[list[float]] | None = None

    @model_validator(mode="after")
    def _validate(self) -> "KernelPayload":
        n = len(self.labels)
        if n == 0:
            raise ValueError("kernel needs at least one point")
        if len(set(self.labels)) != n:
            raise ValueError("labels must be unique")
        if len(self.matrix) != n:
            raise ValueError(f"matrix has {len(self.matrix)} rows for {n} labels")
        for i, row in enumerate(self.matrix):
            if len(row) != n:
                raise ValueError(f"matrix row {i} has {len(row)} entries, expected {n}")
            for j, value in enumerate(row):
                if not math.isfinite(value):
                    raise ValueError(f"matrix entry ({i}, {j}) is not finite")
        if self.coords is not None and len(self.coords) != n:
            raise ValueError("coords must list one row per point")
        return self

    @classmethod
    def from_kernel(cls, kernel: CostKernel) -> "KernelPayload":
        return cls(
            labels=list(kernel.labels),
            matrix=[[float(v) for v in row] for row in kernel.matrix],
            coords=None
            if kernel.coords is None
            else [list(row) for row in kernel.coords],
        )

    def to_kernel(self) -> CostKernel:
        coords = None if self.coords is None else tuple(tuple(r) for r in self.coords)
        return CostKernel(labels=tuple(self.labels), matrix=self.matrix, coords=coords)


class LagrangianPayload(BaseModel):
    """Parameters for generating a kernel from a periodic Lagrangian."""

    potential: Literal["zero", "pendulum", "two_harmonic"] = "zero"
    grid_size: int = Field(ge=2)
    substeps: int = Field(default=1, ge=1)
    amplitude: float = 0.0
    phase: float = 0.0
    amplitude2: float = 0.0
    phase2: float = 0.0
    kinetic: float = Field(default=1.0, gt=0)

    def to_spec(self) -> LagrangianSpec:
        return LagrangianSpec(
            grid_size=self.grid_size,
            substeps=self.substeps,
            potential=self.potential,
            amplitude=self.amplitude,
            phase=self.phase,
            amplitude2=self.amplitude2,
            phase2=self.phase2,
            kinetic=self.kinetic,
        )


MeasureSpec = list[float] | str


class CheckResult(BaseModel):
    """One named residual measured against its tolerance."""

    name: str
    residual: float
    tolerance: float
    passed: bool


def make_check(name: str, residual: float, tolerance: float) -> CheckResult:
    return CheckResult(
        name=name,
        residual=float(residual),
        tolerance=float(tolerance),
        passed=float(residual) <= float(tolerance),
    )


class ReportHeader(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    report_version: Literal[1] = REPORT_VERSION
    command: str
    digest: str
    size: int
    tolerances: ToleranceParams
    passed: bool


class IngestRequest(BaseModel):
    kernel: KernelPayload | None = None
    lagrangian: LagrangianPayload | None = None
    tolerances: ToleranceParams = ToleranceParams()

    @model_validator(mode="after")
    def _exactly_one_source(self) -> "IngestRequest":
        if (self.kernel is None) == (self.lagrangian is None):
            raise ValueError("provide exactly one of 'kernel' or 'lagrangian'")
        return self


class IngestReport(ReportHeader):
    command: Literal["ingest"] = "ingest"
    critical_value: float
    kernel: KernelPayload


class AnalyzeRequest(BaseModel):
    kernel: KernelPayload
    tolerances: ToleranceParams = ToleranceParams()
    composition_depths: list[int] = [1, 2, 3]
    oracle_window: tuple[int, int] | None = None
    include_barrier: bool = False


class OracleBlock(BaseModel):
    window: tuple[int, int]
    stabilized: bool
    drift: float
    max_deviation: float


class AnalyzeReport(ReportHeader):
    command: Literal["analyze"] = "analyze"
    critical_value: float
    oscillation_bound: float
    aubry: list[int]
    d_edges: list[tuple[int, int]]
    self_barrier: list[float]
    checks: list[CheckResult]
    oracle: OracleBlock | None = None
    barrier: list[list[float]] | None = None


class KamRequest(BaseModel):
    kernel: KernelPayload
    tolerances: ToleranceParams = ToleranceParams()
    seed: int = 0
    num_pairs: int = Field(default=8, ge=1, le=512)


class KamReport(ReportHeader):
    command: Literal["kam"] = "kam"
    critical_value: float
    num_pairs: int
    checks: list[CheckResult]
    phi0: list[float]
    phi1: list[float]


class TransportRequest(BaseModel):
    kernel: KernelPayload
    tolerances: ToleranceParams = ToleranceParams()
    mu0: MeasureSpec = "uniform"
    mu1: MeasureSpec = "uniform"


class TransportReport(ReportHeader):
    command: Literal["transport"] = "transport"
    critical_value: float
    primal_value: float
    dual_value_: float = Field(alias="dual_value")
    gap: float
    kr_value: float | None = None
    checks: list[CheckResult]
    coupling_support: list[tuple[int, int, float]]
    midpoint_measure: list[float]
    phi0: list[float]
    phi1: list[float]

    model_config = ConfigDict(populate_by_name=True, protected_namespaces=())


class MatherRequest(BaseModel):
    kernel: KernelPayload
    tolerances: ToleranceParams = ToleranceParams()
    extra_family_seeds: int = Field(default=4, ge=0, le=256)
    seed: int = 0


class MatherReport(ReportHeader):
    command: Literal["mather"] = "mather"
    critical_value: float
    value: float
    coupling_support: list[tuple[int, int, float]]
    d_edges: list[tuple[int, int]]
    tight_edges: list[tuple[int, int]]
    core_edges: list[tuple[int, int]]
    core_matches_d: bool
    checks: list[CheckResult]


class ErgodicRequest(BaseModel):
    kernel: KernelPayload
    tolerances: ToleranceParams = ToleranceParams()
    seed: int = 0
    orbit_length: int = Field(default=100_000, ge=2, le=10_000_000)


class ErgodicReport(ReportHeader):
    command: Literal["ergodic"] = "ergodic"
    critical_value: float
    value: float
    birkhoff_average: float
    birkhoff_sigma: float
    birkhoff_threshold: float
    two_step_tv: float
    occupation_tv: float
    recurrent_class_count: int
    orbit_length: int
    seed: int
    orbit_head: list[int]
    checks: list[CheckResult]


class HealthReport(BaseModel):
    status: Literal["ok"] = "ok"
    version: str

"""Typed request and response payloads shared by the service and the CLI.

Every request model validates the module preconditions up front, so a bad
configuration is rejected before any computation starts - as an exit-code-2
error on the command line or a 422 from the HTTP API.
"""

from __future__ import annotations

import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class StrictRequest(BaseModel):
    """Requests reject unknown fields so configuration typos fail fast."""

    model_config = ConfigDict(extra="forbid")


class AnalyticRequest(StrictRequest):
    """Closed-form sweep: phase vs c at fixed winding, or vs alpha at fixed c."""

    winding: float = Field(default=1.0, gt=0)
    alpha: Optional[float] = Field(default=None, gt=0, description="overrides winding * pi")
    sweep: Literal["c", "alpha"] = "c"
    c: Optional[float] = Field(default=None, ge=0, description="fixed c for alpha sweeps")
    c_max: float = Field(default=4.0, gt=0)
    c_step: float = Field(default=1e-3, gt=0)
    alpha_step: float = Field(default=1e-3, gt=0)

    @model_validator(mode="after")
    def _check(self) -> "AnalyticRequest":
        if self.sweep == "alpha" and self.c is None:
            raise ValueError("alpha sweeps need a fixed c (--c)")
        return self

    @property
    def alpha_total(self) -> float:
        return self.alpha if self.alpha is not None else self.winding * math.pi


class CriticalRequest(StrictRequest):
    winding: float = Field(default=1.0, gt=0)
    resolution: float = Field(default=1e-3, gt=0, le=0.01)
    refine_tol: float = Field(default=1e-12, gt=0, le=1e-9)


class FiniteNRequest(StrictRequest):
    """Finite-N phase curves: per (n_steps, c) pair vs alpha, or per n_steps vs c."""

    n_steps: list[int] = Field(min_length=1)
    c_values: Optional[list[float]] = None
    winding: float = Field(default=1.0, gt=0)
    sweep: Literal["alpha", "c"] = "alpha"
    alpha_step: float = Field(default=0.01, gt=0)
    c_max: float = Field(default=4.0, gt=0)
    c_step: float = Field(default=0.01, gt=0)
    allow_analytic_continuation: bool = False

    @model_validator(mode="after")
    def _check(self) -> "FiniteNRequest":
        if any(n < 1 for n in self.n_steps):
            raise ValueError("every n_steps entry must be >= 1")
        if self.sweep == "alpha":
            if not self.c_values:
                raise ValueError("alpha sweeps need c values (--c)")
            if any(c < 0 for c in self.c_values):
                raise ValueError("every c value must be >= 0")
        if not self.allow_analytic_continuation:
            if self.sweep == "alpha":
                bad = [
                    (n, c)
                    for n in self.n_steps
                    for c in self.c_values
                    if 4.0 * c / n > 1.0
                ]
            else:
                bad = [(n, self.c_max) for n in self.n_steps if 4.0 * self.c_max / n > 1.0]
            if bad:
                raise ValueError(
                    f"eta = 4c/N > 1 for cells {bad}; pass allow_analytic_continuation"
                )
        return self


class LandscapeRequest(StrictRequest):
    n_start: int = Field(ge=1)
    n_stop: int = Field(ge=1)
    n_step: int = Field(default=1, ge=1)
    c_start: float = Field(ge=0)
    c_stop: float = Field(ge=0)
    c_step: float = Field(gt=0)
    winding: float = Field(default=1.0, gt=0)
    workers: int = Field(default=1, ge=1)
    allow_analytic_continuation: bool = False

    @model_validator(mode="after")
    def _check(self) -> "LandscapeRequest":
        if self.n_stop < self.n_start:
            raise ValueError("n_stop must be >= n_start")
        if self.c_stop < self.c_start:
            raise ValueError("c_stop must be >= c_start")
        return self


class NoiseRequest(LandscapeRequest):
    spread: float = Field(ge=0)
    samples: int = Field(default=100, ge=1)
    seed: int = Field(default=0, ge=0)
    noise_mode: Literal["winding", "per-step"] = "winding"
    quantization_tol: float = Field(default=0.05 * math.pi, gt=0)
    stability_threshold: float = Field(default=0.1, gt=0)


class TrajectoryRequest(StrictRequest):
    n_steps: int = Field(ge=1)
    c: float = Field(ge=0)
    winding: float = Field(default=1.0, gt=0)
    samples: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0)
    include_exact: bool = False

    @model_validator(mode="after")
    def _check(self) -> "TrajectoryRequest":
        if 4.0 * self.c / self.n_steps > 1.0:
            raise ValueError(
                f"eta = 4c/N = {4.0 * self.c / self.n_steps:.6g} > 1; "
                "trajectory sampling is physical only for c <= N/4"
            )
        if self.include_exact and self.n_steps > 12:
            raise ValueError("exact record enumeration is limited to n_steps <= 12")
        return self


class Manifest(BaseModel):
    tool: str = "geophase"
    version: str
    subcommand: str
    params: dict


class AnalyticRow(BaseModel):
    c_or_alpha: float
    phase: float
    amplitude_re: float
    amplitude_im: float
    bracket: float


class CriticalRow(BaseModel):
    winding: float
    index: int
    c_crit: float
    jump: str


class FiniteNRow(BaseModel):
    n_steps: int
    c: float
    alpha: float
    phase: float


class LandscapeRow(BaseModel):
    n_steps: int
    c: float
    phase: Optional[float]
    postselect_prob: Optional[float]
    validity: str
    stability: Optional[float]


class TrajectoryRow(BaseModel):
    sample_index: int
    readouts: str
    probability: float
    pancharatnam_phase: Optional[float]


class AnalyticResponse(BaseModel):
    manifest: Manifest
    data: list[AnalyticRow]
    criticals: list[CriticalRow]


class CriticalResponse(BaseModel):
    manifest: Manifest
    data: list[CriticalRow]


class FiniteNResponse(BaseModel):
    manifest: Manifest
    data: list[FiniteNRow]


class LandscapeResponse(BaseModel):
    manifest: Manifest
    data: list[LandscapeRow]
    report: Optional[dict] = None


class TrajectoryResponse(BaseModel):
    manifest: Manifest
    data: list[TrajectoryRow]
    summary: dict

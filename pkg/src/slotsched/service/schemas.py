"""Pydantic request/response models for the scheduling service."""

from __future__ import annotations

import math

from pydantic import BaseModel, Field, field_validator, model_validator

from ..experiments import ExperimentConfig


class InstancePayload(BaseModel):
    """One period's problem, wire format of ``core.Instance``."""

    m: int = Field(ge=1, description="number of slots")
    k: int = Field(ge=1, description="capacity of each slot")
    valuations: list[list[float]] = Field(
        description="n x m matrix; row i is agent i's non-negative valuation per slot"
    )

    @model_validator(mode="after")
    def _check_matrix(self) -> "InstancePayload":
        for i, row in enumerate(self.valuations):
            if len(row) != self.m:
                raise ValueError(f"row {i} has {len(row)} entries, expected m = {self.m}")
            for v in row:
                if not math.isfinite(v) or v < 0:
                    raise ValueError(f"row {i} contains a negative or non-finite valuation")
        return self


class OutcomePayload(BaseModel):
    """Wire format of ``core.Outcome``."""

    assignment: list[int | None]
    delays: list[float]
    welfare: float


class PrioritizationRequest(BaseModel):
    m: int = Field(default=5, ge=1)
    k: int = Field(default=4, ge=1)
    delta: float = Field(default=0.65, gt=0.0, lt=1.0)
    n_min: int = Field(default=2, ge=2)
    n_max: int | None = None
    trials_factor: int = Field(default=1, ge=1)
    seed: int = 0
    regimes: list[str] = Field(default=["identical", "random"])

    @field_validator("regimes")
    @classmethod
    def _known_regimes(cls, value: list[str]) -> list[str]:
        for regime in value:
            if regime not in ("identical", "random"):
                raise ValueError(f"unknown preference regime {regime!r}")
        if not value:
            raise ValueError("at least one regime is required")
        return value

    def to_config(self) -> ExperimentConfig:
        return ExperimentConfig(
            m=self.m,
            k=self.k,
            delta=self.delta,
            n_min=self.n_min,
            n_max=self.n_max,
            trials_factor=self.trials_factor,
            seed=self.seed,
            regimes=tuple(self.regimes),
        )


class MispriorityRequest(BaseModel):
    m: int = Field(default=5, ge=1)
    k: int = Field(default=4, ge=1)
    delta: float = Field(default=0.65, gt=0.0, lt=1.0)
    n_min: int = Field(default=2, ge=2)
    n_max: int | None = None
    trials_factor: int = Field(default=1, ge=1)
    seed: int = 0

    def to_config(self) -> ExperimentConfig:
        return ExperimentConfig(
            m=self.m,
            k=self.k,
            delta=self.delta,
            n_min=self.n_min,
            n_max=self.n_max,
            trials_factor=self.trials_factor,
            seed=self.seed,
        )


class CongestionRequest(BaseModel):
    capacities: list[int] = Field(default=[24, 30])
    days: int = Field(default=31, ge=1)
    delta: float = Field(default=0.65, gt=0.0, lt=1.0)
    seed: int = 0
    footfall_csv: str | None = Field(
        default=None,
        description="checkout timestamps, one ISO-8601 per line; omit for the calibrated synthetic month",
    )

    @field_validator("capacities")
    @classmethod
    def _positive_caps(cls, value: list[int]) -> list[int]:
        if not value or any(c < 1 for c in value):
            raise ValueError("capacities must be a non-empty list of integers >= 1")
        return value

    def to_config(self) -> ExperimentConfig:
        return ExperimentConfig(
            delta=self.delta,
            seed=self.seed,
            capacities=tuple(self.capacities),
            days=self.days,
        )


class BenchRequest(BaseModel):
    k: int = Field(default=12, ge=1)
    m_list: list[int] = Field(default=[2, 4, 6, 8, 10, 12, 14])
    trials: int = Field(default=3, ge=1)
    seed: int = 0

    @field_validator("m_list")
    @classmethod
    def _positive_ms(cls, value: list[int]) -> list[int]:
        if not value or any(m < 1 for m in value):
            raise ValueError("m_list must be a non-empty list of integers >= 1")
        return value

    def to_config(self) -> ExperimentConfig:
        return ExperimentConfig(
            seed=self.seed,
            bench_k=self.k,
            bench_m_list=tuple(self.m_list),
            bench_trials=self.trials,
        )


class ExperimentResponse(BaseModel):
    """Named CSV files produced by one experiment run."""

    files: dict[str, str]


class HealthResponse(BaseModel):
    status: str
    version: str

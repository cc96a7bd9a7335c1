"""Request and response schemas shared by the HTTP API and the CLI.

Every run is configured entirely by its request model, so a request is a
reproducible record of what was computed.  Moment fields are null when the
sample is too small or degenerate for them.
"""

from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, Field, field_validator

from ..experiments import TargetState

_U64_MAX = 2**64 - 1

Complex2 = tuple[float, float]


class TargetModel(BaseModel):
    """Alternative reference state: 4x4 matrix of [re, im] pairs plus angles.

    ``angles`` are (theta, phi) for a, a', b, b'.  When ``reference_value``
    is omitted the value at the given angles is used.
    """

    matrix: list[list[Complex2]]
    angles: list[float] = Field(min_length=8, max_length=8)
    reference_value: float | None = None

    @field_validator("matrix")
    @classmethod
    def _square_4x4(cls, v):
        if len(v) != 4 or any(len(row) != 4 for row in v):
            raise ValueError("matrix must be 4x4")
        return v

    def to_target(self) -> TargetState:
        rows = [[complex(re, im) for re, im in row] for row in self.matrix]
        return TargetState.from_parts(rows, self.angles, self.reference_value)


class TypicalityRequest(BaseModel):
    seed: int = Field(default=0, ge=0, le=_U64_MAX)
    count: int = Field(default=5000, ge=1, description="number of random states")
    starts: int = Field(default=50, ge=1)
    bins: int = Field(default=40, ge=1)
    workers: int | None = Field(default=None, ge=1)


class NeighborhoodRequest(BaseModel):
    seed: int = Field(default=0, ge=0, le=_U64_MAX)
    count: int = Field(default=300, ge=1, description="hits to collect (min_hits)")
    alpha: float = Field(gt=0.0, lt=1.0)
    budget: int = Field(default=2_000_000, ge=1, description="max states generated")
    bins: int = Field(default=40, ge=1)
    workers: int | None = Field(default=None, ge=1)
    target: TargetModel | None = None


class ScatterRequest(BaseModel):
    seed: int = Field(default=0, ge=0, le=_U64_MAX)
    count: int = Field(default=10_000, ge=1, description="number of random states")
    bins: int = Field(default=40, ge=1)
    workers: int | None = Field(default=None, ge=1)
    target: TargetModel | None = None


class FidPdfRequest(BaseModel):
    seed: int = Field(default=0, ge=0, le=_U64_MAX)
    count: int = Field(default=100_000, ge=1, description="number of random states")
    ensemble: Literal["filtered", "hs", "bures"] = "filtered"
    bins: int = Field(default=40, ge=1)
    workers: int | None = Field(default=None, ge=1)
    target: TargetModel | None = None


class VerifyRequest(BaseModel):
    seed: int = Field(default=0, ge=0, le=_U64_MAX)
    count: int = Field(default=200, ge=1, description="states in the oracle sweep")
    pairs: int = Field(default=200, ge=1, description="pairs per ensemble in the bound sweep")
    oracle_tol: float = Field(default=1e-5, ge=0.0)
    target_tol: float = Field(default=5e-3, ge=0.0)
    workers: int | None = Field(default=None, ge=1)
    target: TargetModel | None = None


class HistogramModel(BaseModel):
    edges: list[float]
    counts: list[int]


class StatsResponse(BaseModel):
    """One schema for every stats-emitting run."""

    command: str
    seed: int
    n: int
    mean: float | None
    variance: float | None
    skewness: float | None
    kurtosis: float | None
    p_violation: float | None
    histogram: HistogramModel
    extras: dict = Field(default_factory=dict)


class VerifyCheck(BaseModel):
    name: str
    passed: bool
    detail: str


class VerifyResponse(BaseModel):
    passed: bool
    checks: list[VerifyCheck]


def nan_to_none(x: float) -> float | None:
    """Map NaN to None so degenerate moments serialize as null."""
    return None if math.isnan(x) else float(x)

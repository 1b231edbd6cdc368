"""Request/response models for the HTTP service (also used by the CLI client)."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field

from ..experiments import ExperimentConfig, GraphModel


class HealthResponse(BaseModel):
    status: str
    version: str


class GraphRequest(BaseModel):
    graph: GraphModel


class GraphResponse(BaseModel):
    n: int
    edge_count: int
    edges: list[tuple[int, int]]
    edge_list: str
    connected: bool


class WalksRequest(BaseModel):
    edge_list: str
    method: Literal["exact", "mc"] = "exact"
    coupling: Literal["single", "exchange"] = "single"
    trials: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0)
    pairs: list[tuple[int, int]] | None = None


class WalkResult(BaseModel):
    kind: Literal["hitting", "meeting"]
    walk: Literal["af", "sf"]
    pair: tuple[int, int]
    value: float
    method: Literal["exact", "mc"]
    se: float | None = None
    truncation: float | None = None


class WalksResponse(BaseModel):
    n: int
    coupling: str
    results: list[WalkResult]


class BoundsRequest(BaseModel):
    n: int = Field(ge=2)
    b: int | None = Field(default=None, ge=1)
    j: int | None = Field(default=None, ge=1)
    p: float | None = Field(default=None, gt=0.0, le=1.0)
    h_sf_max: float | None = None


class BoundReportModel(BaseModel):
    name: str
    inputs: dict[str, Any]
    value: float
    formula: str


class BoundsResponse(BaseModel):
    reports: list[BoundReportModel]


class RunRequest(BaseModel):
    config: ExperimentConfig


class RunResponse(BaseModel):
    payload: dict[str, Any]
    csv: str
    bound_violated: bool

"""FastAPI application wrapping the core package."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..experiments import ConfigError
from . import handlers
from .schemas import (
    BoundsRequest,
    BoundsResponse,
    GraphRequest,
    GraphResponse,
    HealthResponse,
    RunRequest,
    RunResponse,
    WalksRequest,
    WalksResponse,
)

app = FastAPI(
    title="qgossip",
    description=(
        "Quantized gossip averaging: seeded simulation batches, exact random-walk "
        "analyses, and closed-form bound evaluation."
    ),
)


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return handlers.health()


@app.post("/graph", response_model=GraphResponse)
def graph_build(req: GraphRequest) -> GraphResponse:
    try:
        return handlers.graph_build(req)
    except (ValueError, ConfigError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/walks", response_model=WalksResponse)
def walks(req: WalksRequest) -> WalksResponse:
    try:
        return handlers.walks(req)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/bounds", response_model=BoundsResponse)
def bounds(req: BoundsRequest) -> BoundsResponse:
    try:
        return handlers.bounds(req)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/run", response_model=RunResponse)
def run(req: RunRequest) -> RunResponse:
    try:
        return handlers.run(req)
    except (ConfigError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))

"""Service operations as plain functions: request model in, response model out.

The FastAPI routes and the CLI's in-process mode both call these, so the two
entry points cannot drift apart.
"""

from __future__ import annotations

from .. import __version__
from ..bounds import standard_reports
from ..experiments import (
    build_graph,
    records_to_csv,
    result_payload,
    run_experiment,
)
from ..graphs import ConstantSchedule, graph_from_text, graph_to_text, is_connected
from ..randwalk import (
    hitting_time_matrix,
    meeting_time_exact,
    meeting_time_mc,
    p_af,
    p_sf,
)
from .schemas import (
    BoundReportModel,
    BoundsRequest,
    BoundsResponse,
    GraphRequest,
    GraphResponse,
    HealthResponse,
    RunRequest,
    RunResponse,
    WalkResult,
    WalksRequest,
    WalksResponse,
)


def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


def graph_build(req: GraphRequest) -> GraphResponse:
    g = build_graph(req.graph)
    return GraphResponse(
        n=g.n,
        edge_count=g.edge_count,
        edges=sorted(g.edges),
        edge_list=graph_to_text(g),
        connected=is_connected(g),
    )


def walks(req: WalksRequest) -> WalksResponse:
    g = graph_from_text(req.edge_list)
    results: list[WalkResult] = []
    if req.method == "exact":
        h_af = hitting_time_matrix(p_af(g))
        h_sf = hitting_time_matrix(p_sf(g))
        meeting = meeting_time_exact(p_af(g), coupling=req.coupling)
        for i in range(g.n):
            for j in range(g.n):
                if i == j:
                    continue
                results.append(
                    WalkResult(kind="hitting", walk="af", pair=(i, j), value=h_af[i, j], method="exact")
                )
                results.append(
                    WalkResult(kind="hitting", walk="sf", pair=(i, j), value=h_sf[i, j], method="exact")
                )
                results.append(
                    WalkResult(
                        kind="meeting",
                        walk="af",
                        pair=(i, j),
                        value=meeting.per_pair[i, j],
                        method="exact",
                        truncation=meeting.truncation,
                    )
                )
    else:
        pairs = req.pairs if req.pairs else [(0, g.n - 1)]
        schedule = ConstantSchedule(g)
        for k, pair in enumerate(pairs):
            est = meeting_time_mc(
                schedule,
                tuple(pair),
                trials=req.trials,
                seed=(req.seed, k),
                rule="af",
            )
            results.append(
                WalkResult(
                    kind="meeting",
                    walk="af",
                    pair=tuple(pair),
                    value=est.mean,
                    method="mc",
                    se=est.se,
                )
            )
    return WalksResponse(n=g.n, coupling=req.coupling, results=results)


def bounds(req: BoundsRequest) -> BoundsResponse:
    reports = standard_reports(n=req.n, b=req.b, j0=req.j, p=req.p, h_sf_max=req.h_sf_max)
    return BoundsResponse(reports=[BoundReportModel(**r.as_dict()) for r in reports])


def run(req: RunRequest) -> RunResponse:
    result = run_experiment(req.config)
    return RunResponse(
        payload=result_payload(result),
        csv=records_to_csv(result.records),
        bound_violated=result.bound_violated,
    )

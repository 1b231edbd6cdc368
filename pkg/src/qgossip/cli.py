"""Command-line client for the qgossip service.

Subcommands build the same request models the HTTP API takes. Without
--server (or QGOSSIP_SERVER) the service handlers run in-process; with it,
requests go over HTTP to a running `qgossip serve` instance. Output paths
that are relative resolve under QGOSSIP_OUT_DIR when that variable is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .experiments import ConfigError, GraphModel, load_config
from .service import handlers
from .service.schemas import (
    BoundsRequest,
    BoundsResponse,
    GraphRequest,
    GraphResponse,
    RunRequest,
    RunResponse,
    WalksRequest,
    WalksResponse,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BOUND_VIOLATION = 3


def _server_url(args) -> str | None:
    return args.server or os.environ.get("QGOSSIP_SERVER") or None


def _dispatch(server: str | None, path: str, request, response_cls):
    if server is None:
        handler = {
            "/graph": handlers.graph_build,
            "/walks": handlers.walks,
            "/bounds": handlers.bounds,
            "/run": handlers.run,
        }[path]
        return handler(request)
    import httpx

    resp = httpx.post(
        server.rstrip("/") + path,
        json=request.model_dump(mode="json"),
        timeout=None,
    )
    if resp.status_code != 200:
        raise ConfigError(f"server returned {resp.status_code}: {resp.text}")
    return response_cls.model_validate(resp.json())


def _resolve_out(path_arg: str | None) -> Path | None:
    if path_arg is None:
        return None
    path = Path(path_arg)
    out_dir = os.environ.get("QGOSSIP_OUT_DIR")
    if out_dir and not path.is_absolute():
        path = Path(out_dir) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_or_print(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)
        print(f"wrote {path}")


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.max_ticks is not None:
        overrides["max_ticks"] = args.max_ticks
    if overrides:
        cfg = cfg.model_copy(update=overrides)
    response = _dispatch(_server_url(args), "/run", RunRequest(config=cfg), RunResponse)
    out = _resolve_out(args.out)
    if args.format == "csv":
        _write_or_print(response.csv, out)
    else:
        _write_or_print(_json_text(response.payload), out)
    if response.bound_violated:
        print("bound violation detected; see the comparisons section", file=sys.stderr)
        return EXIT_BOUND_VIOLATION
    return EXIT_OK


def cmd_walks(args) -> int:
    edge_list = Path(args.graph_file).read_text()
    request = WalksRequest(
        edge_list=edge_list,
        method="mc" if args.mc else "exact",
        coupling=args.coupling,
        trials=args.trials,
        seed=args.seed,
        pairs=_parse_pairs(args.pairs) if args.pairs else None,
    )
    response = _dispatch(_server_url(args), "/walks", request, WalksResponse)
    _write_or_print(_json_text(response.model_dump(mode="json")), _resolve_out(args.out))
    return EXIT_OK


def _parse_pairs(text: str) -> list[tuple[int, int]]:
    pairs = []
    for chunk in text.split(","):
        i, j = chunk.split(":")
        pairs.append((int(i), int(j)))
    return pairs


def cmd_bounds(args) -> int:
    request = BoundsRequest(n=args.n, b=args.b, j=args.j, p=args.p)
    response = _dispatch(_server_url(args), "/bounds", request, BoundsResponse)
    _write_or_print(_json_text(response.model_dump(mode="json")), _resolve_out(args.out))
    return EXIT_OK


def cmd_graph(args) -> int:
    model = GraphModel(kind=args.kind, n=args.n, m=args.m, p=args.p, seed=args.seed)
    response = _dispatch(_server_url(args), "/graph", GraphRequest(graph=model), GraphResponse)
    _write_or_print(response.edge_list, _resolve_out(args.out))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgossip")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--server", default=None, help="service URL; in-process if omitted")
        p.add_argument("--out", default=None, help="output path (relative paths honor QGOSSIP_OUT_DIR)")

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config", help="YAML/JSON experiment description")
    p_run.add_argument("--trials", type=int, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--max-ticks", type=int, default=None, dest="max_ticks")
    p_run.add_argument("--format", choices=("csv", "json"), default="csv")
    add_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_walks = sub.add_parser("walks", help="hitting/meeting analysis of a graph file")
    p_walks.add_argument("graph_file")
    mode = p_walks.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", default=True)
    mode.add_argument("--mc", action="store_true")
    p_walks.add_argument("--coupling", choices=("single", "exchange"), default="single")
    p_walks.add_argument("--trials", type=int, default=1000)
    p_walks.add_argument("--seed", type=int, default=0)
    p_walks.add_argument("--pairs", default=None, help="start pairs as i:j,i:j for --mc")
    add_common(p_walks)
    p_walks.set_defaults(func=cmd_walks)

    p_bounds = sub.add_parser("bounds", help="evaluate closed-form bounds")
    p_bounds.add_argument("--n", type=int, required=True)
    p_bounds.add_argument("--b", type=int, default=None)
    p_bounds.add_argument("--j", type=int, default=None)
    p_bounds.add_argument("--p", type=float, default=None)
    add_common(p_bounds)
    p_bounds.set_defaults(func=cmd_bounds)

    p_graph = sub.add_parser("graph", help="build or sample a graph as edge-list text")
    p_graph.add_argument("kind", choices=("path", "cycle", "star", "complete", "lollipop", "lollipop_m0", "gnp"))
    p_graph.add_argument("--n", type=int, required=True)
    p_graph.add_argument("--m", type=int, default=None)
    p_graph.add_argument("--p", type=float, default=None)
    p_graph.add_argument("--seed", type=int, default=None)
    add_common(p_graph)
    p_graph.set_defaults(func=cmd_graph)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

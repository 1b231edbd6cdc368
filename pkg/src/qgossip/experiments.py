"""Declarative experiment configs, scenario presets, batch execution, and emission.

A config names an algorithm, a graph or schedule, a quantizer, an initial
state, and trial/seed bookkeeping. Per-trial seeds are derived from the master
seed and the trial index, so records are independent of execution order and a
re-run with the same config is byte-identical.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Literal

import numpy as np
import yaml
from pydantic import BaseModel, Field, model_validator

from . import bounds as bounds_mod
from . import randwalk
from .dynamics import DEFAULT_MAX_TICKS, RunRecord, allowed_unit_range, run
from .graphs import (
    ConstantSchedule,
    GnpEveryTick,
    Graph,
    GraphSchedule,
    PeriodicSchedule,
    build_named,
    check_periodic_connectivity,
    empty_graph,
    is_connected,
    lollipop_graph,
    sample_gnp,
)
from .quantization import QState, QuantizerSpec, mean_units, spread

# seed-derivation lanes: entropy tuples (master, lane, ...) never collide across uses
_LANE_TRIAL = 0
_LANE_INIT = 1
_LANE_SCHEDULE = 2
_LANE_WALK = 3


class ConfigError(ValueError):
    """The experiment description is invalid."""


class QuantizerModel(BaseModel):
    u_min: float = 0.0
    u_max: float = 8.0
    r: int = Field(default=3, ge=1)

    def to_spec(self) -> QuantizerSpec:
        return QuantizerSpec(self.u_min, self.u_max, self.r)


class GraphModel(BaseModel):
    kind: Literal["path", "cycle", "star", "complete", "lollipop", "lollipop_m0", "gnp"]
    n: int = Field(ge=2)
    m: int | None = None
    p: float | None = None
    seed: int | None = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "lollipop" and self.m is None:
            raise ValueError("lollipop graph needs a clique size m")
        if self.kind == "gnp" and self.p is None:
            raise ValueError("gnp graph needs an edge probability p")
        return self


class ScheduleModel(BaseModel):
    kind: Literal["constant", "scaled", "gnp_per_tick"] = "constant"
    b: int = Field(default=1, ge=1)


class InitialModel(BaseModel):
    kind: Literal["psi", "random", "explicit"] = "psi"
    units: list[int] | None = None
    low_node: int = 0
    high_node: int | None = None
    min_spread: int = Field(default=1, ge=0)

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "explicit" and not self.units:
            raise ValueError("explicit initial state needs a units list")
        return self


class ExperimentConfig(BaseModel):
    algorithm: Literal["AF", "AS", "AR-analysis"]
    graph: GraphModel
    schedule: ScheduleModel = ScheduleModel()
    quantizer: QuantizerModel = QuantizerModel()
    initial: InitialModel = InitialModel()
    trials: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0)
    max_ticks: int = Field(default=DEFAULT_MAX_TICKS, ge=1)
    name: str | None = None

    @model_validator(mode="after")
    def _check(self):
        if self.algorithm == "AF" and self.schedule.kind != "constant":
            raise ValueError("the fixed-graph algorithm runs on a constant schedule")
        if self.schedule.kind == "gnp_per_tick" and self.graph.kind != "gnp":
            raise ValueError("a per-tick gnp schedule needs a gnp graph spec")
        if self.algorithm == "AR-analysis" and self.graph.kind != "gnp":
            raise ValueError("random-graph analysis needs a gnp graph spec")
        return self


def preset_psi(n: int, low_node: int = 0, high_node: int | None = None) -> list[int]:
    """Worst-case initial units: one node at 0, one at 2, the rest at 1."""
    if n < 3:
        raise ValueError("the worst-case preset needs n >= 3")
    high = n - 1 if high_node is None else high_node
    if low_node == high or not (0 <= low_node < n and 0 <= high < n):
        raise ValueError("extreme nodes must be distinct and in range")
    units = [1] * n
    units[low_node] = 0
    units[high] = 2
    return units


def preset_lollipop_m0(n: int) -> Graph:
    """Lollipop with the clique size floor((2n+1)/3) that maximizes hitting times."""
    if n < 4:
        raise ValueError("the lollipop preset needs n >= 4")
    return lollipop_graph(n, (2 * n + 1) // 3)


def preset_scaled_schedule(g: Graph, b: int) -> GraphSchedule:
    """g at ticks that are multiples of b, all nodes isolated otherwise."""
    if b < 1:
        raise ValueError("scaling factor must be >= 1")
    if b == 1:
        return ConstantSchedule(g)
    return PeriodicSchedule((g,) + (empty_graph(g.n),) * (b - 1))


def _derive_seed(master: int, lane: int, index: int = 0) -> int:
    state = np.random.SeedSequence([master, lane, index]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def build_graph(model: GraphModel, master_seed: int = 0) -> Graph:
    if model.kind == "lollipop_m0":
        return preset_lollipop_m0(model.n)
    if model.kind == "gnp":
        seed = model.seed if model.seed is not None else _derive_seed(master_seed, _LANE_SCHEDULE)
        return sample_gnp(model.n, model.p, seed)
    return build_named(model.kind, model.n, model.m)


def build_schedule(cfg: ExperimentConfig, graph: Graph) -> GraphSchedule:
    sched = cfg.schedule
    if sched.kind == "constant":
        return ConstantSchedule(graph)
    if sched.kind == "scaled":
        return preset_scaled_schedule(graph, sched.b)
    return GnpEveryTick(cfg.graph.n, cfg.graph.p, _derive_seed(cfg.seed, _LANE_SCHEDULE))


def build_initial(cfg: ExperimentConfig) -> QState:
    spec = cfg.quantizer.to_spec()
    init = cfg.initial
    n = cfg.graph.n
    if init.kind == "explicit":
        if len(init.units) != n:
            raise ConfigError(f"explicit units have length {len(init.units)}, graph has n={n}")
        return QState(init.units, spec)
    if init.kind == "psi":
        return QState(preset_psi(n, init.low_node, init.high_node), spec)
    rng = np.random.default_rng(_derive_seed(cfg.seed, _LANE_INIT))
    top = spec.levels
    for _ in range(10_000):
        units = [int(k) for k in rng.integers(0, top + 1, size=n)]
        if max(units) - min(units) >= init.min_spread:
            return QState(units, spec)
    raise ConfigError("could not draw an initial state with the requested spread")


@dataclass(frozen=True)
class SummaryStats:
    """Convergence-tick statistics over the completed trials of a batch."""

    trials: int
    timeouts: int
    mean: float
    variance: float
    se: float
    ci95: tuple[float, float] | None
    min: float
    max: float

    @classmethod
    def from_records(cls, records: list[RunRecord]) -> "SummaryStats":
        times = [r.t_con for r in records if r.t_con is not None]
        timeouts = sum(1 for r in records if r.timeout)
        if not times:
            nan = float("nan")
            return cls(len(records), timeouts, nan, nan, nan, None, nan, nan)
        mean = sum(times) / len(times)
        var = (
            sum((t - mean) ** 2 for t in times) / (len(times) - 1)
            if len(times) > 1
            else 0.0
        )
        se = math.sqrt(var / len(times))
        ci = None
        if timeouts == 0:
            ci = (mean - 1.96 * se, mean + 1.96 * se)
        return cls(
            trials=len(records),
            timeouts=timeouts,
            mean=mean,
            variance=var,
            se=se,
            ci95=ci,
            min=float(min(times)),
            max=float(max(times)),
        )

    def as_dict(self) -> dict[str, Any]:
        return {
            "trials": self.trials,
            "timeouts": self.timeouts,
            "mean": self.mean,
            "variance": self.variance,
            "se": self.se,
            "ci95": list(self.ci95) if self.ci95 is not None else None,
            "min": self.min,
            "max": self.max,
        }


@dataclass(frozen=True)
class BoundComparison:
    """Measured statistic versus an evaluated bound."""

    name: str
    measured: float
    bound: float
    ok: bool

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "measured": self.measured,
            "bound": self.bound,
            "ok": self.ok,
        }


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[RunRecord]
    summary: SummaryStats
    bounds: list[bounds_mod.BoundReport]
    comparisons: list[BoundComparison]
    analysis: dict[str, Any] | None = None

    @property
    def bound_violated(self) -> bool:
        return any(not c.ok for c in self.comparisons)


def _recheck_record(record: RunRecord) -> None:
    """Emission-time invariant check: range, target band, quadratic budget."""
    state = record.final_state
    top = state.spec.levels
    if any(not 0 <= k <= top for k in state.units):
        raise AssertionError("final state left the quantizer range")
    if 2 * record.nontrivial_count > record.lyapunov_initial:
        raise AssertionError("non-trivial count exceeds the quadratic budget")
    if not record.timeout:
        lo, hi = allowed_unit_range(mean_units(state))
        if any(not lo <= k <= hi for k in state.units):
            raise AssertionError("record claims convergence but the state is off-target")


def _dynamics_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    graph = build_graph(cfg.graph, cfg.seed)
    schedule = build_schedule(cfg, graph)
    x0 = build_initial(cfg)
    if cfg.graph.n != x0.n:
        raise ConfigError("initial state size does not match the graph")
    if cfg.algorithm == "AF" and not is_connected(graph):
        raise ConfigError("the fixed-graph algorithm needs a connected graph")
    if cfg.algorithm == "AS":
        b = cfg.schedule.b
        try:
            ok = check_periodic_connectivity(schedule, b, max(8 * b, b + 1))
        except ValueError:
            ok = False
        if not ok:
            warnings.warn("schedule fails the window connectivity check", stacklevel=2)

    records: list[RunRecord] = []
    for idx in range(cfg.trials):
        trial_seed = _derive_seed(cfg.seed, _LANE_TRIAL, idx)
        trial_schedule = schedule
        if isinstance(schedule, GnpEveryTick):
            trial_schedule = schedule.reseeded(_derive_seed(cfg.seed, _LANE_SCHEDULE, idx + 1))
        record = run(
            cfg.algorithm,
            trial_schedule,
            x0.copy(),
            trial_seed,
            max_ticks=cfg.max_ticks,
            assumption_window=cfg.schedule.b,
        )
        _recheck_record(record)
        records.append(record)

    summary = SummaryStats.from_records(records)
    j0 = spread(x0)
    reports: list[bounds_mod.BoundReport] = []
    comparisons: list[BoundComparison] = []
    budget_exact, _ = bounds_mod.nontrivial_budget(x0)
    if budget_exact > 0:
        reports.append(
            bounds_mod.BoundReport(
                name="nontrivial_budget",
                inputs={"n": x0.n, "j0": j0},
                value=float(budget_exact),
                formula="V/(2*delta^2)",
            )
        )
    if j0 >= 1 and not math.isnan(summary.mean):
        if cfg.algorithm == "AF":
            bound = bounds_mod.fixed_convergence_bound(x0.n, j0)
            reports.append(
                bounds_mod.BoundReport(
                    name="fixed_convergence",
                    inputs={"n": x0.n, "j0": j0},
                    value=bound,
                    formula="(n^2*j0^2/8)*((8/27)*n^3 - 1)",
                )
            )
            comparisons.append(
                BoundComparison(
                    name="fixed_convergence",
                    measured=summary.mean - 3 * summary.se,
                    bound=bound,
                    ok=summary.mean - 3 * summary.se <= bound,
                )
            )
        else:
            bound = bounds_mod.switching_convergence_bound(x0.n, cfg.schedule.b, j0)
            reports.append(
                bounds_mod.BoundReport(
                    name="switching_convergence",
                    inputs={"n": x0.n, "b": cfg.schedule.b, "j0": j0},
                    value=bound,
                    formula="0.5*b*j0^2*n^2*(16*n^7 + 1)",
                )
            )
            comparisons.append(
                BoundComparison(
                    name="switching_convergence",
                    measured=summary.mean - 3 * summary.se,
                    bound=bound,
                    ok=summary.mean - 3 * summary.se <= bound,
                )
            )
    return ExperimentResult(cfg, records, summary, reports, comparisons)


def _random_graph_analysis(cfg: ExperimentConfig) -> ExperimentResult:
    n = cfg.graph.n
    p = cfg.graph.p
    p0 = randwalk.edge_selection_prob(n, p)
    exact_meeting = 1.0 / (2.0 * p0)
    schedule = GnpEveryTick(n, p, _derive_seed(cfg.seed, _LANE_SCHEDULE))
    estimate = randwalk.meeting_time_mc(
        schedule,
        (0, n - 1),
        trials=cfg.trials,
        seed=_derive_seed(cfg.seed, _LANE_WALK),
        rule="af",
        tick_cap=cfg.max_ticks,
    )
    reports = bounds_mod.standard_reports(n=n, p=p, j0=2)
    deviation = abs(estimate.mean - exact_meeting)
    window = 3 * estimate.se if estimate.se > 0 else 1e-9
    comparisons = [
        BoundComparison(
            name="random_graph_meeting_mc",
            measured=estimate.mean,
            bound=exact_meeting,
            ok=bool(deviation <= window and not estimate.flagged),
        )
    ]
    analysis = {
        "p0": p0,
        "exact_meeting": exact_meeting,
        "mc_mean": estimate.mean,
        "mc_se": estimate.se,
        "mc_trials": estimate.trials,
        "mc_timeouts": estimate.timeouts,
    }
    summary = SummaryStats.from_records([])
    return ExperimentResult(cfg, [], summary, reports, comparisons, analysis)


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Execute the batch described by cfg; identical configs give identical results."""
    if cfg.algorithm == "AR-analysis":
        return _random_graph_analysis(cfg)
    return _dynamics_experiment(cfg)


# -- emission ---------------------------------------------------------------

RECORD_FIELDS = (
    "algorithm",
    "n",
    "graph",
    "seed",
    "t_con",
    "timeout",
    "nontrivial",
    "trivial",
    "noop",
    "j0",
    "v0",
)


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    if value is None:
        return ""
    return str(value)


def record_row(record: RunRecord) -> dict[str, Any]:
    return {
        "algorithm": record.algorithm,
        "n": record.n,
        "graph": record.graph_desc,
        "seed": record.seed,
        "t_con": record.t_con,
        "timeout": record.timeout,
        "nontrivial": record.nontrivial_count,
        "trivial": record.trivial_count,
        "noop": record.noop_count,
        "j0": record.initial_spread,
        "v0": float(record.lyapunov_initial),
    }


def records_to_csv(records: list[RunRecord]) -> str:
    lines = [",".join(RECORD_FIELDS)]
    for record in records:
        row = record_row(record)
        lines.append(",".join(_fmt(row[f]) for f in RECORD_FIELDS))
    return "\n".join(lines) + "\n"


def _round_floats(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        obj = float(obj)
    if isinstance(obj, float):
        # non-finite values (empty summaries) become null so the JSON stays strict
        return float(f"{obj:.12g}") if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def result_payload(result: ExperimentResult) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "records": [record_row(r) for r in result.records],
        "summary": result.summary.as_dict(),
        "bounds": [b.as_dict() for b in result.bounds],
        "comparisons": [c.as_dict() for c in result.comparisons],
    }
    if result.analysis is not None:
        payload["analysis"] = result.analysis
    return _round_floats(payload)


def result_to_json(result: ExperimentResult) -> str:
    return json.dumps(result_payload(result), indent=2) + "\n"


def emit(result: ExperimentResult, fmt: str, path: str | Path) -> None:
    """Write the batch outcome as CSV (records only) or JSON (full payload)."""
    for record in result.records:
        _recheck_record(record)
    if fmt == "csv":
        text = records_to_csv(result.records)
    elif fmt == "json":
        text = result_to_json(result)
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    Path(path).write_text(text)


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse a YAML (or JSON) experiment description."""
    raw = Path(path).read_text()
    try:
        data = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"could not parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path} does not contain a mapping")
    try:
        return ExperimentConfig.model_validate(data)
    except Exception as exc:
        raise ConfigError(f"invalid experiment config: {exc}") from exc

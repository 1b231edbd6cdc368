"""Asynchronous gossip steps and full trajectory runs.

One node activates per clock tick. On a fixed graph the active node picks a
uniform neighbor; on switching graphs a neighbor j is picked with probability
1/max(deg_i, deg_j), with the leftover mass realized as an explicit no-op so
the induced walk matrix stays symmetric. An exchange moves ceil(d/2) steps
from the larger state to the smaller, conserving the unit sum exactly.

Every tick consumes exactly two uniforms from the trial RNG (active-node draw,
partner draw), so a run is replayable bit-exactly from its seed.
"""

from __future__ import annotations

import warnings
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graphs import (
    ConstantSchedule,
    Graph,
    GraphSchedule,
    PeriodicSchedule,
    check_periodic_connectivity,
    is_connected,
)
from .quantization import QState, lyapunov_scaled, mean_units, spread

NOOP = "noop"
TRIVIAL = "trivial"
NONTRIVIAL = "nontrivial"

DEFAULT_MAX_TICKS = 10_000_000

RNG_DRAWS_PER_TICK = 2


@dataclass(frozen=True)
class TickEvent:
    """Outcome of one clock tick."""

    t: int
    active: int
    partner: int | None
    delta_units: int
    kind: str


@dataclass
class RunRecord:
    """One trajectory's outcome, replayable from its seed."""

    algorithm: str
    n: int
    graph_desc: str
    seed: int
    t_con: int | None
    timeout: bool
    nontrivial_count: int
    trivial_count: int
    noop_count: int
    initial_spread: int
    lyapunov_initial: Fraction
    final_state: QState


def compute_delta(d_units: int) -> int:
    """Units moved in an exchange between states d_units apart: ceil(d/2).

    Even gaps split exactly; odd gaps average-and-swap, leaving the pair one
    unit apart. d = 1 therefore swaps the two values outright.
    """
    if d_units < 0:
        raise ValueError("difference must be nonnegative")
    return (d_units + 1) // 2


def allowed_unit_range(xbar0_units: Fraction | int) -> tuple[int, int]:
    """Closed unit interval a converged state must occupy for a given exact mean."""
    m = Fraction(xbar0_units)
    if m.denominator == 1:
        return int(m), int(m)
    lo = m.numerator // m.denominator
    return lo, lo + 1


def has_converged(x: QState, xbar0_units: Fraction | int) -> bool:
    """True iff every node sits in the target band around the initial mean.

    For a mean that is an exact unit multiple this demands exact consensus;
    otherwise every node must hold the floor level or the one above it.
    """
    lo, hi = allowed_unit_range(xbar0_units)
    return all(lo <= k <= hi for k in x.units)


def _as_tables(g: Graph) -> tuple[tuple[tuple[int, ...], tuple[float, ...]], ...]:
    """Per-node partner lists with cumulative acceptance thresholds."""
    tables = []
    for i in range(g.n):
        nbrs = g.neighbors[i]
        cum = []
        acc = 0.0
        di = len(nbrs)
        for j in nbrs:
            acc += 1.0 / max(di, len(g.neighbors[j]))
            cum.append(acc)
        tables.append((nbrs, tuple(cum)))
    return tuple(tables)


def _exchange(units: list[int], i: int, j: int) -> tuple[str, int]:
    """Apply the pairwise update in place; returns (kind, delta_units)."""
    d = units[i] - units[j]
    if d == 0:
        return NOOP, 0
    ad = -d if d < 0 else d
    delta = (ad + 1) // 2
    if d > 0:
        units[i] -= delta
        units[j] += delta
    else:
        units[i] += delta
        units[j] -= delta
    return (TRIVIAL if ad == 1 else NONTRIVIAL), delta


def af_step(x: QState, g: Graph, rng: np.random.Generator, t: int = 0) -> TickEvent:
    """One tick of the fixed-graph algorithm; mutates x."""
    n = x.n
    i = int(rng.random() * n)
    u = rng.random()
    nbrs = g.neighbors[i]
    if not nbrs:
        raise AssertionError("active node has no neighbors on a connected graph")
    j = nbrs[int(u * len(nbrs))]
    kind, delta = _exchange(x.units, i, j)
    return TickEvent(t=t, active=i, partner=j, delta_units=delta, kind=kind)


def as_step(x: QState, g_t: Graph, rng: np.random.Generator, t: int = 0) -> TickEvent:
    """One tick of the switching-graph algorithm on the graph active at t; mutates x."""
    n = x.n
    i = int(rng.random() * n)
    u = rng.random()
    partners, cum = _as_tables(g_t)[i]
    if not partners:
        return TickEvent(t=t, active=i, partner=None, delta_units=0, kind=NOOP)
    idx = bisect_right(cum, u)
    if idx >= len(partners):
        # residual self-loop mass of the symmetrized selection rule
        return TickEvent(t=t, active=i, partner=None, delta_units=0, kind=NOOP)
    j = partners[idx]
    kind, delta = _exchange(x.units, i, j)
    return TickEvent(t=t, active=i, partner=j, delta_units=delta, kind=kind)


def _check_as_preconditions(schedule: GraphSchedule, window: int | None) -> None:
    b = window if window is not None else (schedule.period or 1)
    horizon = max(b * 8, b + 1)
    try:
        ok = check_periodic_connectivity(schedule, b, horizon)
    except ValueError:
        ok = False
    if not ok:
        warnings.warn(
            f"schedule {schedule.describe()} fails the window-{b} union connectivity "
            "check; the run may not converge",
            stacklevel=3,
        )


def run(
    algorithm: str,
    schedule: GraphSchedule,
    x0: QState,
    seed,
    max_ticks: int = DEFAULT_MAX_TICKS,
    assumption_window: int | None = None,
) -> RunRecord:
    """Run one seeded trajectory until the target band is reached or max_ticks expires.

    Timeout is reported in the record, not raised. The tick protocol matches
    af_step/as_step exactly, so a run can be replayed step by step.
    """
    algorithm = algorithm.upper()
    if algorithm not in ("AF", "AS"):
        raise ValueError(f"unknown algorithm {algorithm!r}")
    n = x0.n
    if schedule.n != n:
        raise ValueError(f"schedule is for {schedule.n} nodes, state has {n}")
    if algorithm == "AF":
        if not isinstance(schedule, ConstantSchedule):
            raise ValueError("AF requires a constant schedule")
        if not is_connected(schedule.graph):
            raise ValueError("AF requires a connected graph")
    else:
        _check_as_preconditions(schedule, assumption_window)

    units = list(x0.units)
    sum0 = sum(units)
    j0 = spread(x0)
    v0_scaled = lyapunov_scaled(units)
    lo, hi = allowed_unit_range(mean_units(x0))
    bad = sum(1 for k in units if not lo <= k <= hi)

    nontrivial = trivial = noop = 0
    t = 0
    t_con: int | None = 0 if bad == 0 else None
    rng = np.random.default_rng(seed)

    if bad:
        af_neighbors = None
        as_phase_tables = None
        generator = None
        if algorithm == "AF":
            af_neighbors = schedule.graph.neighbors
        elif isinstance(schedule, ConstantSchedule):
            as_phase_tables = (_as_tables(schedule.graph),)
        elif isinstance(schedule, PeriodicSchedule):
            as_phase_tables = tuple(_as_tables(g) for g in schedule.graphs)
        else:
            generator = schedule

        block = 8192
        while t < max_ticks and bad:
            count = min(block, max_ticks - t)
            draws = rng.random(RNG_DRAWS_PER_TICK * count)
            for b_idx in range(count):
                i = int(draws[2 * b_idx] * n)
                u = draws[2 * b_idx + 1]
                if af_neighbors is not None:
                    nbrs = af_neighbors[i]
                    j = nbrs[int(u * len(nbrs))]
                else:
                    if as_phase_tables is not None:
                        partners, cum = as_phase_tables[t % len(as_phase_tables)][i]
                    else:
                        partners, cum = _as_tables(generator.graph_at(t))[i]
                    if not partners:
                        noop += 1
                        t += 1
                        continue
                    idx = bisect_right(cum, u)
                    if idx >= len(partners):
                        noop += 1
                        t += 1
                        continue
                    j = partners[idx]
                ui = units[i]
                uj = units[j]
                d = ui - uj
                if d == 0:
                    noop += 1
                    t += 1
                    continue
                ad = -d if d < 0 else d
                delta = (ad + 1) // 2
                if d > 0:
                    ni = ui - delta
                    nj = uj + delta
                else:
                    ni = ui + delta
                    nj = uj - delta
                units[i] = ni
                units[j] = nj
                if ad == 1:
                    trivial += 1
                else:
                    nontrivial += 1
                bad += (0 if lo <= ni <= hi else 1) - (0 if lo <= ui <= hi else 1)
                bad += (0 if lo <= nj <= hi else 1) - (0 if lo <= uj <= hi else 1)
                t += 1
                if bad == 0:
                    t_con = t
                    break

    final = QState(units, x0.spec)
    if sum(units) != sum0:
        raise AssertionError("unit sum was not conserved; dynamics bug")
    if 2 * n * nontrivial > v0_scaled:
        raise AssertionError("non-trivial event count exceeded the quadratic budget")
    return RunRecord(
        algorithm=algorithm,
        n=n,
        graph_desc=schedule.describe(),
        seed=int(seed) if np.isscalar(seed) else seed,
        t_con=t_con,
        timeout=t_con is None,
        nontrivial_count=nontrivial,
        trivial_count=trivial,
        noop_count=noop,
        initial_spread=j0,
        lyapunov_initial=Fraction(v0_scaled, n),
        final_state=final,
    )

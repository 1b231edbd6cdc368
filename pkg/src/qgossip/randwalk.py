"""Transition matrices, exact hitting/meeting times, and Monte Carlo estimates.

Meeting times are absorption times of a chain on node pairs with the diagonal
absorbing. Two couplings of the pair chain are provided:

- "single": one token steps per tick (each chosen with probability 1/N), the
  classic two-token protocol. Off-diagonal pair rates are the walk's own
  off-diagonal entries.
- "exchange": a pairwise exchange fires whenever either endpoint initiates it,
  so the rate along (a, k) is p[a,k] + p[k,a]. This is the exact law of how
  the two extreme values travel under the averaging dynamics, and is the
  oracle for convergence-time experiments.

The couplings share every meeting rate (p[a,b] + p[b,a]) but "exchange" moves
the pair around faster, so absorption times coincide only when meeting is
geometric from every pair (complete-graph-like walks with uniform
off-diagonal rates); on general graphs they differ.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .graphs import GnpEveryTick, Graph, GraphSchedule, is_connected

ROW_SUM_TOL = 1e-12
SOLVE_TOL = 1e-10
PRODUCT_CHAIN_MAX_N = 60


class UnboundedHittingTimeError(ValueError):
    """The target set is unreachable from some state."""


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic matrix of a random walk."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError("transition matrix must be square")
        if np.any(p < -ROW_SUM_TOL) or np.any(p > 1 + ROW_SUM_TOL):
            raise ValueError("transition probabilities must lie in [0, 1]")
        if np.max(np.abs(p.sum(axis=1) - 1.0)) > ROW_SUM_TOL:
            raise ValueError("rows must sum to 1")
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.p.shape[0]


def p_af(g: Graph) -> TransitionMatrix:
    """Natural walk of the fixed-graph algorithm: stay with 1 - 1/n, else a uniform neighbor."""
    if not is_connected(g):
        raise ValueError("fixed-graph walk requires a connected graph")
    n = g.n
    p = np.zeros((n, n))
    for i in range(n):
        p[i, i] = 1.0 - 1.0 / n
        deg = g.degree(i)
        for j in g.neighbors[i]:
            p[i, j] = 1.0 / (n * deg)
    return TransitionMatrix(p)


def p_sf(g: Graph) -> TransitionMatrix:
    """Simple walk: no self-loop, uniform over neighbors."""
    if not is_connected(g):
        raise ValueError("simple walk requires a connected graph")
    n = g.n
    p = np.zeros((n, n))
    for i in range(n):
        for j in g.neighbors[i]:
            p[i, j] = 1.0 / g.degree(i)
    return TransitionMatrix(p)


def p_as(g: Graph) -> TransitionMatrix:
    """Symmetrized walk of the switching-graph algorithm; isolated nodes hold still."""
    n = g.n
    p = np.zeros((n, n))
    for i in range(n):
        deg = g.degree(i)
        if deg == 0:
            p[i, i] = 1.0
            continue
        for j in g.neighbors[i]:
            p[i, j] = 1.0 / (n * max(deg, g.degree(j)))
        p[i, i] = 1.0 - p[i].sum()
    return TransitionMatrix(p)


def edge_selection_prob(n: int, p: float) -> float:
    """Per-tick probability that a given directed edge fires on a fresh G(n, p) draw.

    Sums over the number m of additional neighbors the active node gets:
    (1/n) * sum_m p/(m+1) * C(n-2, m) p^m (1-p)^(n-2-m).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    total = 0.0
    for m in range(n - 1):
        total += (p / (m + 1)) * math.comb(n - 2, m) * p**m * (1 - p) ** (n - 2 - m)
    return total / n


def p_ar(n: int, p: float) -> TransitionMatrix:
    """Effective fixed walk for per-tick G(n, p) sampling: uniform off-diagonal rate p0."""
    if not 0.0 < p <= 1.0:
        raise ValueError("edge probability must lie in (0, 1]; p = 0 never connects")
    p0 = edge_selection_prob(n, p)
    mat = np.full((n, n), p0)
    np.fill_diagonal(mat, 1.0 - (n - 1) * p0)
    return TransitionMatrix(mat)


def _assert_reaches(p: np.ndarray, targets: set[int]) -> None:
    """Raise unless every state can reach the target set along positive-probability arcs."""
    n = p.shape[0]
    can_reach = set(targets)
    queue = deque(targets)
    incoming = [np.flatnonzero(p[:, j] > 0.0) for j in range(n)]
    while queue:
        j = queue.popleft()
        for i in incoming[j]:
            i = int(i)
            if i not in can_reach:
                can_reach.add(i)
                queue.append(i)
    if len(can_reach) != n:
        missing = sorted(set(range(n)) - can_reach)
        raise UnboundedHittingTimeError(
            f"states {missing} cannot reach the target set; hitting time is unbounded"
        )


def hitting_times_exact(pm: TransitionMatrix, targets: Sequence[int] | set[int]) -> np.ndarray:
    """Expected steps to first reach the target set, solved exactly.

    Solves h_i = 0 on targets and h_i = 1 + sum_k p_ik h_k elsewhere; the
    solution is checked against the system to a 1e-10 relative residual.
    """
    target_set = set(int(t) for t in targets)
    if not target_set:
        raise ValueError("target set must be nonempty")
    n = pm.n
    if any(not 0 <= t < n for t in target_set):
        raise ValueError("target outside state range")
    _assert_reaches(pm.p, target_set)
    a = np.eye(n) - pm.p
    b = np.ones(n)
    for t in target_set:
        a[t, :] = 0.0
        a[t, t] = 1.0
        b[t] = 0.0
    h = np.linalg.solve(a, b)
    residual = np.linalg.norm(a @ h - b) / np.linalg.norm(b)
    if not np.isfinite(h).all() or residual > SOLVE_TOL:
        raise np.linalg.LinAlgError(f"hitting-time solve residual {residual:.2e} too large")
    return h


def hitting_time_matrix(pm: TransitionMatrix) -> np.ndarray:
    """H[i, j] = expected steps from i to first reach j (0 on the diagonal)."""
    n = pm.n
    out = np.zeros((n, n))
    for j in range(n):
        out[:, j] = hitting_times_exact(pm, {j})
    return out


@dataclass(frozen=True)
class ProductChain:
    """Chain on ordered node pairs, row-major: state (i, j) has index i*n + j."""

    base_n: int
    q: np.ndarray
    coupling: str

    def __post_init__(self):
        n2 = self.base_n * self.base_n
        if self.q.shape != (n2, n2):
            raise ValueError("pair-chain matrix has the wrong shape")

    @property
    def absorbing(self) -> tuple[int, ...]:
        return tuple(k * self.base_n + k for k in range(self.base_n))

    def state_index(self, i: int, j: int) -> int:
        return i * self.base_n + j


def _guard_product_size(n: int) -> None:
    if n > PRODUCT_CHAIN_MAX_N:
        raise ValueError(
            f"pair chain on {n * n} states exceeds the n <= {PRODUCT_CHAIN_MAX_N} guard"
        )


def product_chain(pm: TransitionMatrix) -> ProductChain:
    """Independent joint chain: both walks step each tick, q = p (x) p."""
    _guard_product_size(pm.n)
    return ProductChain(pm.n, np.kron(pm.p, pm.p), coupling="independent")


def meeting_chain(pm: TransitionMatrix, coupling: str = "single") -> ProductChain:
    """Pair chain in which at most one position changes per tick.

    "single": token protocol rates (off-diagonal entries of the walk).
    "exchange": either endpoint may initiate, rate p[a,k] + p[k,a]; the pair
    merges on meeting, so diagonal states are absorbing by construction.
    """
    if coupling not in ("single", "exchange"):
        raise ValueError(f"unknown coupling {coupling!r}")
    _guard_product_size(pm.n)
    p = pm.p
    n = pm.n
    q = np.zeros((n * n, n * n))
    for a in range(n):
        for b in range(n):
            s = a * n + b
            if a == b:
                if coupling == "single":
                    for k in range(n):
                        if k != a:
                            q[s, k * n + b] += p[a, k]
                            q[s, a * n + k] += p[a, k]
                    stay = 1.0 - q[s].sum()
                    if stay < -1e-9:
                        raise ValueError(
                            "walk lacks the holding probability required by the "
                            "one-move coupling"
                        )
                    q[s, s] = max(stay, 0.0)
                else:
                    q[s, s] = 1.0
                continue
            move = 0.0
            for k in range(n):
                if k == a or k == b:
                    continue
                ra = p[a, k] if coupling == "single" else p[a, k] + p[k, a]
                rb = p[b, k] if coupling == "single" else p[b, k] + p[k, b]
                q[s, k * n + b] += ra
                q[s, a * n + k] += rb
                move += ra + rb
            meet = p[a, b] + p[b, a]
            q[s, a * n + a] += meet / 2.0
            q[s, b * n + b] += meet / 2.0
            move += meet
            stay = 1.0 - move
            if stay < -1e-9:
                raise ValueError(
                    "walk lacks the holding probability required by the one-move coupling"
                )
            q[s, s] = max(stay, 0.0)
    return ProductChain(n, q, coupling=coupling)


def absorb(pc: ProductChain) -> ProductChain:
    """Replace every diagonal-state row with a unit row."""
    q = pc.q.copy()
    for s in pc.absorbing:
        q[s, :] = 0.0
        q[s, s] = 1.0
    return ProductChain(pc.base_n, q, coupling=pc.coupling)


@dataclass(frozen=True)
class MeetingTimes:
    """Expected first-meeting ticks per ordered start pair (0 on the diagonal)."""

    per_pair: np.ndarray
    coupling: str
    method: str = "exact"
    truncation: float = 0.0
    start_times: tuple[int, ...] = (0,)

    @property
    def worst(self) -> float:
        return float(self.per_pair.max())


def meeting_time_exact(pm: TransitionMatrix, coupling: str = "single") -> MeetingTimes:
    """Absorption time of the pair chain into the diagonal, solved exactly."""
    n = pm.n
    chain = absorb(meeting_chain(pm, coupling))
    transient = [a * n + b for a in range(n) for b in range(n) if a != b]
    _assert_reaches(chain.q, set(chain.absorbing))
    q_tt = chain.q[np.ix_(transient, transient)]
    a = np.eye(len(transient)) - q_tt
    b = np.ones(len(transient))
    h = np.linalg.solve(a, b)
    residual = np.linalg.norm(a @ h - b) / np.linalg.norm(b)
    if not np.isfinite(h).all() or residual > SOLVE_TOL:
        raise np.linalg.LinAlgError(f"meeting-time solve residual {residual:.2e} too large")
    per_pair = np.zeros((n, n))
    for idx, s in enumerate(transient):
        per_pair[s // n, s % n] = h[idx]
    return MeetingTimes(per_pair=per_pair, coupling=coupling)


def survival_series(
    matrix_at: Callable[[int], np.ndarray],
    n: int,
    t_max: int,
) -> np.ndarray:
    """Off-diagonal occupancy mass of the pair chain for every start pair.

    Returns an array of shape (t_max + 1, n*n): entry [t, s] is the probability
    that the chain started at pair s is outside the diagonal at tick t.
    """
    n2 = n * n
    diag = [k * n + k for k in range(n)]
    prod = np.eye(n2)
    out = np.empty((t_max + 1, n2))
    out[0] = 1.0 - prod[:, diag].sum(axis=1)
    for t in range(t_max):
        prod = prod @ matrix_at(t)
        out[t + 1] = 1.0 - prod[:, diag].sum(axis=1)
    return out


def meeting_time_schedule(
    schedule: GraphSchedule,
    matrix_rule: Callable[[Graph], TransitionMatrix] = p_as,
    coupling: str = "single",
    tail_tol: float = 1e-9,
    tick_cap: int = 1_000_000,
) -> MeetingTimes:
    """Meeting time on a time-varying graph by accumulating survival mass.

    E[T] = sum_t P(T > t) on the absorbed pair chain; the run stops once the
    largest survival mass drops below tail_tol, and the discarded tail is
    reported via a geometric extrapolation of the final decay. For periodic
    schedules every start time within one period is evaluated (the per-pair
    result keeps the worst); generator schedules are evaluated at start 0 only.
    """
    n = schedule.n
    _guard_product_size(n)
    period = schedule.period
    starts = tuple(range(period)) if period is not None else (0,)
    n2 = n * n
    diag = [k * n + k for k in range(n)]
    per_pair = np.zeros((n, n))
    worst_tail = 0.0
    window = max(period or 1, 1)
    for s0 in starts:
        chains: dict[int, np.ndarray] = {}

        def q_at(t: int) -> np.ndarray:
            key = (s0 + t) % period if period is not None else t
            if key not in chains:
                g = schedule.graph_at(s0 + t)
                chains[key] = absorb(meeting_chain(matrix_rule(g), coupling)).q
            return chains[key]

        prod = np.eye(n2)
        total = 1.0 - prod[:, diag].sum(axis=1)
        history: list[float] = [float(total.max())]
        t = 0
        while True:
            prod = prod @ q_at(t)
            t += 1
            survival = 1.0 - prod[:, diag].sum(axis=1)
            cur = float(survival.max())
            history.append(cur)
            total = total + survival
            if cur < tail_tol:
                break
            if t >= tick_cap:
                raise RuntimeError(
                    f"survival mass still {cur:.3e} after {t} ticks; "
                    "window connectivity is likely violated"
                )
        # geometric extrapolation of the discarded tail from the final window
        tail = 0.0
        if cur > 0.0 and len(history) > window:
            prev = history[-1 - window]
            if prev > 0.0:
                rho = (cur / prev) ** (1.0 / window)
                if rho < 1.0:
                    tail = cur * rho / (1.0 - rho)
                else:
                    tail = float("inf")
        worst_tail = max(worst_tail, tail)
        per_pair = np.maximum(per_pair, total.reshape(n, n))
    np.fill_diagonal(per_pair, 0.0)
    return MeetingTimes(
        per_pair=per_pair,
        coupling=coupling,
        method="exact",
        truncation=worst_tail,
        start_times=starts,
    )


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    se: float
    trials: int
    timeouts: int

    @property
    def flagged(self) -> bool:
        return self.timeouts > 0


def _move_token(
    pos: int,
    g: Graph,
    rule: str,
    rng: np.random.Generator,
) -> int:
    nbrs = g.neighbors[pos]
    if not nbrs:
        return pos
    if rule == "af":
        return nbrs[int(rng.random() * len(nbrs))]
    # symmetrized rule: uniform candidate, accepted with deg_i / max(deg_i, deg_j)
    j = nbrs[int(rng.random() * len(nbrs))]
    di = len(nbrs)
    dj = g.degree(j)
    if dj <= di or rng.random() * dj < di:
        return j
    return pos


def meeting_time_mc(
    schedule: GraphSchedule,
    start_pair: tuple[int, int],
    trials: int,
    seed,
    rule: str = "af",
    tick_cap: int = 10_000_000,
) -> MCEstimate:
    """Simulate the two-token protocol: each tick one token is chosen w.p. 1/n.

    Generator schedules draw an independent graph sequence per trial, so the
    estimate averages over graph randomness as well as walk randomness.
    Capped trials are excluded from the mean and reported in `timeouts`.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if rule not in ("af", "as"):
        raise ValueError(f"unknown movement rule {rule!r}")
    n = schedule.n
    a0, b0 = start_pair
    if a0 == b0:
        raise ValueError("start positions must differ")
    rng = np.random.default_rng(seed)
    inv_n = 1.0 / n
    total = 0.0
    total_sq = 0.0
    timeouts = 0
    constant_graph = schedule.period == 1
    g0 = schedule.graph_at(0) if constant_graph else None
    generator = isinstance(schedule, GnpEveryTick)
    for trial in range(trials):
        trial_schedule = schedule
        if generator:
            fresh = np.random.SeedSequence([schedule.seed, trial]).generate_state(1, np.uint64)
            trial_schedule = schedule.reseeded(int(fresh[0]))
        a, b = a0, b0
        t = 0
        while t < tick_cap:
            g = g0 if constant_graph else trial_schedule.graph_at(t)
            u = rng.random()
            t += 1
            if u < inv_n:
                a = _move_token(a, g, rule, rng)
            elif u < 2 * inv_n:
                b = _move_token(b, g, rule, rng)
            else:
                continue
            if a == b:
                break
        if a != b:
            timeouts += 1
            continue
        total += t
        total_sq += t * t
    done = trials - timeouts
    if done == 0:
        return MCEstimate(mean=float("nan"), se=float("nan"), trials=trials, timeouts=timeouts)
    mean = total / done
    var = max(total_sq / done - mean * mean, 0.0)
    se = math.sqrt(var / done)
    return MCEstimate(mean=mean, se=se, trials=trials, timeouts=timeouts)


def matrix_to_csv(pm: TransitionMatrix) -> str:
    """Row-major CSV at full float precision (round-trips exactly)."""
    return "\n".join(",".join(repr(float(v)) for v in row) for row in pm.p) + "\n"


def matrix_from_csv(text: str) -> TransitionMatrix:
    rows = [
        [float(cell) for cell in line.split(",")]
        for line in text.splitlines()
        if line.strip()
    ]
    return TransitionMatrix(np.array(rows))


def stationary_from_degrees(g: Graph) -> np.ndarray:
    """Degree-proportional distribution d_i / d_max, normalized to sum 1."""
    degs = np.array([g.degree(i) for i in range(g.n)], dtype=float)
    if degs.max() == 0:
        raise ValueError("graph has no edges")
    pi = degs / degs.max()
    return pi / pi.sum()


def reversibility_check(
    pm: TransitionMatrix,
    g: Graph | None = None,
    pi: np.ndarray | None = None,
    tol: float = 1e-12,
) -> tuple[bool, np.ndarray]:
    """Check stationarity (P^T pi = pi) and detailed balance for the given walk.

    With no explicit pi the degree-proportional distribution of g is used.
    Returns (holds, normalized pi); never raises on violation.
    """
    if pi is None:
        if g is None:
            raise ValueError("provide either a graph or an explicit distribution")
        pi = stationary_from_degrees(g)
    pi = np.asarray(pi, dtype=float)
    pi = pi / pi.sum()
    stationary = bool(np.max(np.abs(pm.p.T @ pi - pi)) <= tol)
    balance = bool(np.max(np.abs(pi[:, None] * pm.p - pi[None, :] * pm.p.T)) <= tol)
    return stationary and balance, pi

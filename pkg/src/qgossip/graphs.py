"""Undirected communication graphs and time-varying graph schedules.

Nodes are labeled 0..n-1. Graphs are immutable once built and safe to share
across parallel trials; generator schedules derive a fresh per-tick seed so
replaying the same seed yields the identical graph sequence.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

NAMED_KINDS = ("path", "cycle", "star", "complete", "lollipop")


def _normalize_edge(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Graph:
    """An undirected simple graph: node count plus a set of (i, j) pairs, i < j."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"node count must be positive, got {self.n}")
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop ({i},{i}) not allowed")
            if not (0 <= i < j < self.n):
                raise ValueError(f"edge ({i},{j}) out of range for n={self.n}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        return cls(n, frozenset(_normalize_edge(i, j) for i, j in edges))

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        lists: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            lists[i].append(j)
            lists[j].append(i)
        return tuple(tuple(sorted(l)) for l in lists)

    def degree(self, i: int) -> int:
        return len(self.neighbors[i])

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def describe(self) -> str:
        return f"graph(n={self.n}, edges={self.edge_count})"


def empty_graph(n: int) -> Graph:
    return Graph(n, frozenset())


def path_graph(n: int) -> Graph:
    if n < 2:
        raise ValueError("path graph needs n >= 2")
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle graph needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(n: int) -> Graph:
    """Star with center node 0."""
    if n < 2:
        raise ValueError("star graph needs n >= 2")
    return Graph.from_edges(n, ((0, i) for i in range(1, n)))


def complete_graph(n: int) -> Graph:
    if n < 2:
        raise ValueError("complete graph needs n >= 2")
    return Graph.from_edges(n, ((i, j) for i in range(n) for j in range(i + 1, n)))


def lollipop_graph(n: int, m: int) -> Graph:
    """Clique on nodes 0..m-1 with the path m-1 - m - ... - n-1 attached.

    The path hangs off clique node m-1; node n-1 is the far end.
    """
    if not 2 <= m <= n:
        raise ValueError(f"lollipop needs 2 <= m <= n, got m={m}, n={n}")
    edges = [(i, j) for i in range(m) for j in range(i + 1, m)]
    edges += [(k, k + 1) for k in range(m - 1, n - 1)]
    return Graph.from_edges(n, edges)


def build_named(kind: str, n: int, m: int | None = None) -> Graph:
    """Construct one of the named graph families by name."""
    if kind == "path":
        return path_graph(n)
    if kind == "cycle":
        return cycle_graph(n)
    if kind == "star":
        return star_graph(n)
    if kind == "complete":
        return complete_graph(n)
    if kind == "lollipop":
        if m is None:
            raise ValueError("lollipop requires a clique size m")
        return lollipop_graph(n, m)
    raise ValueError(f"unknown graph kind {kind!r}; expected one of {NAMED_KINDS}")


def sample_gnp(n: int, p: float, seed) -> Graph:
    """Sample an Erdos-Renyi graph: each unordered pair kept independently with probability p.

    Deterministic for a fixed seed; `seed` may be an int or a sequence of ints.
    """
    if n < 2:
        raise ValueError("sample_gnp needs n >= 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    draws = rng.random(len(pairs))
    return Graph.from_edges(n, (pair for pair, u in zip(pairs, draws) if u < p))


def is_connected(g: Graph) -> bool:
    """True iff every node is reachable from node 0."""
    if g.n == 1:
        return True
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v in g.neighbors[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                queue.append(v)
    return count == g.n


def union_graph(graphs: Sequence[Graph]) -> Graph:
    """Edge-set union of graphs sharing the same node count."""
    if not graphs:
        raise ValueError("union of an empty graph list")
    n = graphs[0].n
    for g in graphs:
        if g.n != n:
            raise ValueError(f"node count mismatch in union: {g.n} != {n}")
    edges: set[tuple[int, int]] = set()
    for g in graphs:
        edges |= g.edges
    return Graph(n, frozenset(edges))


class GraphSchedule:
    """Deterministic map from tick index to the graph active at that tick."""

    kind: str = "abstract"
    n: int

    def graph_at(self, t: int) -> Graph:
        raise NotImplementedError

    @property
    def period(self) -> int | None:
        """Length of the repeating cycle, or None for generator schedules."""
        return None

    def describe(self) -> str:
        return self.kind


@dataclass(frozen=True)
class ConstantSchedule(GraphSchedule):
    graph: Graph
    kind: str = field(default="constant", init=False)

    @property
    def n(self) -> int:
        return self.graph.n

    def graph_at(self, t: int) -> Graph:
        return self.graph

    @property
    def period(self) -> int:
        return 1

    def describe(self) -> str:
        return f"constant[{self.graph.describe()}]"


@dataclass(frozen=True)
class PeriodicSchedule(GraphSchedule):
    graphs: tuple[Graph, ...]
    kind: str = field(default="periodic", init=False)

    def __post_init__(self):
        if not self.graphs:
            raise ValueError("periodic schedule needs at least one graph")
        n = self.graphs[0].n
        if any(g.n != n for g in self.graphs):
            raise ValueError("all graphs in a schedule must share the node count")

    @property
    def n(self) -> int:
        return self.graphs[0].n

    def graph_at(self, t: int) -> Graph:
        return self.graphs[t % len(self.graphs)]

    @property
    def period(self) -> int:
        return len(self.graphs)

    def describe(self) -> str:
        return f"periodic[P={len(self.graphs)}, n={self.n}]"


@dataclass(frozen=True)
class GnpEveryTick(GraphSchedule):
    """A fresh, independent G(n, p) draw at every tick, replayable from the seed."""

    n: int
    p: float
    seed: int
    kind: str = field(default="gnp_per_tick", init=False)

    def graph_at(self, t: int) -> Graph:
        return sample_gnp(self.n, self.p, seed=(self.seed, t))

    def reseeded(self, seed: int) -> "GnpEveryTick":
        """Same distribution with an independent stream (for parallel trials)."""
        return GnpEveryTick(self.n, self.p, seed)

    def describe(self) -> str:
        return f"gnp_per_tick[n={self.n}, p={self.p}]"


def check_periodic_connectivity(schedule: GraphSchedule, b: int, horizon: int) -> bool:
    """Check that the union graph over every window of b consecutive ticks is connected.

    For constant/periodic schedules one full period of window starts suffices;
    generator schedules are probed over the full horizon (a spot check only).
    """
    if b < 1:
        raise ValueError("window length must be >= 1")
    if horizon < b:
        raise ValueError("horizon must cover at least one window")
    period = schedule.period
    last_start = horizon - b
    if period is not None:
        last_start = min(last_start, period - 1)
    for t in range(last_start + 1):
        window = [schedule.graph_at(t + k) for k in range(b)]
        if not is_connected(union_graph(window)):
            return False
    return True


def graph_to_text(g: Graph) -> str:
    """Edge-list text: first line the node count, then one 'i j' pair per line."""
    lines = [str(g.n)]
    lines += [f"{i} {j}" for i, j in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> Graph:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError("empty graph text")
    n = int(lines[0])
    edges = []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"malformed edge line: {line!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Graph.from_edges(n, edges)


def write_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(graph_to_text(g))


def read_graph(path: str | Path) -> Graph:
    return graph_from_text(Path(path).read_text())

"""Closed-form performance bounds evaluated as pure functions.

Every evaluator is deterministic in its inputs; experiments compare measured
quantities against these values and fail loudly on violation (which would
indicate an implementation bug, not a tight bound).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .quantization import QState, lyapunov_scaled, spread
from .randwalk import edge_selection_prob


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound, ready for JSON/CSV summaries."""

    name: str
    inputs: dict[str, Any]
    value: float
    formula: str

    def __post_init__(self):
        if not (self.value > 0 and math.isfinite(self.value)):
            raise ValueError(f"bound {self.name} evaluated to non-positive {self.value}")

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "inputs": dict(self.inputs),
            "value": self.value,
            "formula": self.formula,
        }


def meeting_from_hitting_bound(n: int, h_sf_max: float) -> float:
    """Worst-pair meeting time of the natural walk vs. the simple walk's worst hit: 2n*h - n."""
    if n < 2:
        raise ValueError("need n >= 2")
    if h_sf_max < 1:
        raise ValueError("worst hitting time is at least one step")
    return 2.0 * n * h_sf_max - n


def hitting_cubic_bound(n: int) -> float:
    """Universal cubic cap on the simple walk's worst hitting time: (4/27) n^3."""
    if n < 2:
        raise ValueError("need n >= 2")
    return 4.0 * n**3 / 27.0


def fixed_convergence_bound(n: int, j0: int) -> float:
    """Expected convergence ticks on a fixed connected graph: (n^2 j0^2 / 8)((8/27)n^3 - 1)."""
    if n < 2:
        raise ValueError("need n >= 2")
    if j0 < 1:
        raise ValueError("initial spread must be >= 1")
    return (n**2 * j0**2 / 8.0) * (8.0 * n**3 / 27.0 - 1.0)


def mixing_horizon(n: int, b: int) -> int:
    """Smallest integer strictly greater than b(8 n^6 ln(sqrt(2) n) + 1).

    After this many ticks the pair walk on a window-b connected schedule
    occupies the diagonal with probability at least 1/(2n). Natural log.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if b < 1:
        raise ValueError("window length must be >= 1")
    x = b * (8.0 * n**6 * math.log(math.sqrt(2.0) * n) + 1.0)
    return math.floor(x) + 1


def switching_meeting_bound(n: int, b: int) -> float:
    """Meeting time on a window-b connected switching graph: 4n * mixing_horizon."""
    return 4.0 * n * mixing_horizon(n, b)


def switching_convergence_bound(n: int, b: int, j0: int) -> float:
    """Expected convergence ticks on switching graphs: (1/2) b j0^2 n^2 (16 n^7 + 1)."""
    if n < 2:
        raise ValueError("need n >= 2")
    if b < 1 or j0 < 1:
        raise ValueError("window length and spread must be >= 1")
    return 0.5 * b * j0**2 * n**2 * (16.0 * n**7 + 1.0)


def random_graph_convergence_bound(n: int, p: float, j0: int) -> tuple[float, float]:
    """Expected convergence ticks under per-tick G(n, p) sampling.

    Returns (exact, relaxed) = (n j0^2 / (16 p0), n^2 (n-1) j0^2 / (32 p)).
    The relaxation replaces p0 by 2p/(n(n-1)), which only under-estimates p0
    for small p; for large p the relaxed value can drop below the exact one,
    so no ordering is asserted here (the caller decides what to compare).
    """
    if not 0.0 < p <= 1.0:
        raise ValueError("edge probability must lie in (0, 1]")
    if n < 2 or j0 < 1:
        raise ValueError("need n >= 2 and spread >= 1")
    p0 = edge_selection_prob(n, p)
    exact = n * j0**2 / (16.0 * p0)
    relaxed = n**2 * (n - 1) * j0**2 / (32.0 * p)
    return exact, relaxed


def nontrivial_budget(x0: QState) -> tuple[Fraction, Fraction]:
    """Cap on non-trivial exchanges in any run from x0, with its spread relaxation.

    Returns (V/(2 delta^2), n J^2 / 8) as exact rationals; the first never
    exceeds the second (range-variance inequality).
    """
    n = x0.n
    exact = Fraction(lyapunov_scaled(x0.units), 2 * n)
    relaxed = Fraction(n * spread(x0) ** 2, 8)
    assert exact <= relaxed
    return exact, relaxed


def standard_reports(
    n: int,
    b: int | None = None,
    j0: int | None = None,
    p: float | None = None,
    h_sf_max: float | None = None,
) -> list[BoundReport]:
    """Evaluate every bound applicable to the supplied inputs."""
    reports = [
        BoundReport(
            name="hitting_cubic",
            inputs={"n": n},
            value=hitting_cubic_bound(n),
            formula="4*n^3/27",
        )
    ]
    if h_sf_max is not None:
        reports.append(
            BoundReport(
                name="meeting_from_hitting",
                inputs={"n": n, "h_sf_max": h_sf_max},
                value=meeting_from_hitting_bound(n, h_sf_max),
                formula="2*n*h_sf_max - n",
            )
        )
    if j0 is not None:
        reports.append(
            BoundReport(
                name="fixed_convergence",
                inputs={"n": n, "j0": j0},
                value=fixed_convergence_bound(n, j0),
                formula="(n^2*j0^2/8)*((8/27)*n^3 - 1)",
            )
        )
    if b is not None:
        horizon = mixing_horizon(n, b)
        reports.append(
            BoundReport(
                name="mixing_horizon",
                inputs={"n": n, "b": b},
                value=float(horizon),
                formula="min int > b*(8*n^6*ln(sqrt(2)*n) + 1)",
            )
        )
        reports.append(
            BoundReport(
                name="switching_meeting",
                inputs={"n": n, "b": b},
                value=switching_meeting_bound(n, b),
                formula="4*n*mixing_horizon(n, b)",
            )
        )
        if j0 is not None:
            reports.append(
                BoundReport(
                    name="switching_convergence",
                    inputs={"n": n, "b": b, "j0": j0},
                    value=switching_convergence_bound(n, b, j0),
                    formula="0.5*b*j0^2*n^2*(16*n^7 + 1)",
                )
            )
    if p is not None:
        p0 = edge_selection_prob(n, p)
        reports.append(
            BoundReport(
                name="edge_selection_prob",
                inputs={"n": n, "p": p},
                value=p0,
                formula="(1/n)*sum_m p/(m+1)*C(n-2,m)*p^m*(1-p)^(n-2-m)",
            )
        )
        reports.append(
            BoundReport(
                name="random_graph_meeting",
                inputs={"n": n, "p": p},
                value=1.0 / (2.0 * p0),
                formula="1/(2*p0)",
            )
        )
        if j0 is not None:
            exact, relaxed = random_graph_convergence_bound(n, p, j0)
            reports.append(
                BoundReport(
                    name="random_graph_convergence",
                    inputs={"n": n, "p": p, "j0": j0},
                    value=exact,
                    formula="n*j0^2/(16*p0)",
                )
            )
            reports.append(
                BoundReport(
                    name="random_graph_convergence_relaxed",
                    inputs={"n": n, "p": p, "j0": j0},
                    value=relaxed,
                    formula="n^2*(n-1)*j0^2/(32*p)",
                )
            )
    return reports

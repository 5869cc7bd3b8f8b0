"""Synchronous majority updates and trajectory bookkeeping.

Each day every vertex simultaneously adopts the color held by the
majority of its neighbors the previous day, keeping its own color on a
tie (degree-0 vertices therefore never change). The engine is pure
integer arithmetic: a day is one sparse matvec of the +-1 label vector
followed by a sign resolution.

A run terminates at the first unanimity, fixed point, or two-cycle
(period-2 repeat), or when the day cap is hit. Every finite instance
reaches a fixed point or two-cycle within n days, so the default cap
of n + 2 days can never be reached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .coloring import BLUE, RED, Coloring
from .errors import ParameterError, ValidationError
from .graphs import Graph

__all__ = [
    "OutcomeKind",
    "Outcome",
    "DaySummary",
    "Trajectory",
    "LandslideRow",
    "step",
    "run",
    "landslide_profile",
]


class OutcomeKind(str, Enum):
    RED_WIN = "red_win"
    BLUE_WIN = "blue_win"
    STABLE_NON_UNANIMOUS = "stable_non_unanimous"
    TWO_CYCLE = "two_cycle"
    DAY_CAP_REACHED = "day_cap_reached"


@dataclass(frozen=True, eq=False)
class Outcome:
    """Terminal classification of a run.

    ``day`` is the day unanimity held (wins), the first day of the
    stable coloring (fixed points), or the first day of the repeating
    pair (two-cycles); it is None when the day cap was reached.
    ``cycle`` carries the repeating pair of colorings for two-cycles.
    """

    kind: OutcomeKind
    day: Optional[int]
    cycle: Optional[tuple] = None


@dataclass(frozen=True)
class DaySummary:
    t: int
    red: int
    blue: int
    delta: float


@dataclass(eq=False)
class Trajectory:
    """Per-day summaries plus the terminal outcome.

    ``days`` starts at day 0 and is consecutive; ``days_elapsed`` is
    the last simulated day index. ``colorings`` holds the full per-day
    colorings only when the run stored them.
    """

    days: list
    outcome: Outcome
    days_elapsed: int
    colorings: Optional[list] = None

    def blue_counts(self) -> list:
        return [d.blue for d in self.days]

    def red_counts(self) -> list:
        return [d.red for d in self.days]

    def to_json_dict(self, params=None, seed=None) -> dict:
        return {
            "params": params,
            "outcome": {
                "type": self.outcome.kind.value,
                "day": self.outcome.day,
            },
            "days": [
                {"t": d.t, "red": d.red, "blue": d.blue, "delta": d.delta}
                for d in self.days
            ],
            "seed": seed,
        }


def _summary(t: int, c: Coloring) -> DaySummary:
    red = c.red_count
    blue = c.blue_count
    return DaySummary(t=t, red=red, blue=blue, delta=(red - blue) / 2.0)


def _win_outcome(c: Coloring, day: int) -> Outcome:
    kind = OutcomeKind.RED_WIN if c.red_count == c.n else OutcomeKind.BLUE_WIN
    return Outcome(kind, day)


def step(g: Graph, c: Coloring) -> Coloring:
    """One synchronous majority update; the input coloring is untouched."""
    if c.n != g.n:
        raise ValidationError(f"coloring has {c.n} labels, graph has {g.n} vertices")
    sums = g.neighbor_sums(c.labels)
    new = np.where(sums > 0, RED, np.where(sums < 0, BLUE, c.labels)).astype(np.int8)
    return Coloring(new)


def run(
    g: Graph,
    c0: Coloring,
    max_days: Optional[int] = None,
    store_colorings: bool = False,
) -> Trajectory:
    """Iterate majority updates from ``c0`` until a terminal state.

    Termination, in order of precedence per day: unanimity, fixed point
    (new day equals the previous one), two-cycle (new day equals the
    day before the previous one). If none occurs within ``max_days``
    steps the outcome is DAY_CAP_REACHED; with the default cap of
    n + 2 that cannot happen.
    """
    if c0.n != g.n:
        raise ValidationError(f"coloring has {c0.n} labels, graph has {g.n} vertices")
    if max_days is None:
        max_days = g.n + 2
    if max_days < 1:
        raise ParameterError(f"max_days must be >= 1, got {max_days}")

    days = [_summary(0, c0)]
    colorings = [c0] if store_colorings else None
    if c0.is_unanimous():
        return Trajectory(days, _win_outcome(c0, 0), 0, colorings)

    outcome = None
    prev2: Optional[Coloring] = None
    prev = c0
    for t in range(1, max_days + 1):
        cur = step(g, prev)
        days.append(_summary(t, cur))
        if store_colorings:
            colorings.append(cur)
        if cur.is_unanimous():
            outcome = _win_outcome(cur, t)
            break
        if np.array_equal(cur.labels, prev.labels):
            outcome = Outcome(OutcomeKind.STABLE_NON_UNANIMOUS, t - 1)
            break
        if prev2 is not None and np.array_equal(cur.labels, prev2.labels):
            outcome = Outcome(OutcomeKind.TWO_CYCLE, t - 2, cycle=(prev2, prev))
            break
        prev2, prev = prev, cur
    if outcome is None:
        outcome = Outcome(OutcomeKind.DAY_CAP_REACHED, None)
    return Trajectory(days, outcome, len(days) - 1, colorings)


@dataclass(frozen=True)
class LandslideRow:
    day: int
    blue_count: int
    ratio: float
    bound: float
    violates: bool


def landslide_profile(traj: Trajectory, p: float, shrink_constant: float = 100.0) -> list:
    """Per-day Blue shrink ratios against the shrink_constant/(pn) collapse bound.

    Emits one row per day t >= 3 while the Blue side still exceeds
    pn/4, with ratio = blue(t+1)/blue(t). Trajectories shorter than
    that produce an empty profile.
    """
    if p < 0:
        raise ParameterError(f"p must be nonnegative, got {p}")
    days = traj.days
    if len(days) < 2:
        return []
    n = days[0].red + days[0].blue
    pn = p * n
    bound = shrink_constant / pn if pn > 0 else math.inf
    rows = []
    blue = [d.blue for d in days]
    for t in range(3, len(days) - 1):
        if blue[t] <= pn / 4.0:
            break
        ratio = blue[t + 1] / blue[t]
        rows.append(
            LandslideRow(
                day=t,
                blue_count=blue[t],
                ratio=ratio,
                bound=bound,
                violates=ratio > bound,
            )
        )
    return rows

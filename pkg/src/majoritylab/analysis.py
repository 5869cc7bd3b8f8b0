"""Per-vertex diagnostics of the first two days of the dynamics.

Quantities defined relative to a balanced starting coloring and its
defector coupling:

* signed discrepancy: Red-minus-Blue neighbor count of a vertex;
* D-almost-Red set: vertices whose day-1 signed neighborhood sum under
  the balanced run is at least -D (Red-leaning up to slack D);
* flipping vertices: Blue on day 1 under the balanced coloring but Red
  on day 1 once the defectors flip;
* vulnerable vertices: equal Red and non-swing-Blue neighbor counts
  plus at least one swing neighbor (a certificate for flipping);
* regularity report: whether a vertex's neighborhood sizes, color
  split and induced discrepancy-vector norms sit inside their
  sqrt(pn log n)-scale windows (natural log; single and pair form).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .coloring import BLUE, RED, Coloring, DefectorScenario
from .dynamics import step
from .errors import ParameterError, ValidationError
from .graphs import Graph

__all__ = [
    "AlmostRedReport",
    "RegularityReport",
    "signed_discrepancy",
    "signed_discrepancies",
    "almost_red_set",
    "flipping_set",
    "vulnerable_set",
    "regularity_report",
]


def signed_discrepancies(g: Graph, c: Coloring) -> np.ndarray:
    """Red-minus-Blue neighbor count for every vertex (exact integers)."""
    if c.n != g.n:
        raise ValidationError(f"coloring has {c.n} labels, graph has {g.n} vertices")
    return g.neighbor_sums(c.labels)


def signed_discrepancy(g: Graph, c: Coloring, v: int) -> int:
    """Red-minus-Blue neighbor count of vertex ``v``."""
    if not 0 <= v < g.n:
        raise ParameterError(f"vertex {v} out of range [0, {g.n})")
    nbrs = g.neighbors(v)
    return int(c.labels[nbrs].astype(np.int32).sum()) if nbrs.size else 0


@dataclass(frozen=True)
class AlmostRedReport:
    """Vertices whose day-1 signed neighborhood sum is >= -threshold."""

    threshold: int
    members: np.ndarray
    count: int
    excess: float

    def member_mask(self, n: int) -> np.ndarray:
        mask = np.zeros(n, dtype=bool)
        mask[self.members] = True
        return mask


def almost_red_set(g: Graph, hat0: Coloring, threshold: int) -> AlmostRedReport:
    """Membership report of the threshold-almost-Red set.

    Runs one majority day from ``hat0`` and collects the vertices v
    with sum of day-1 labels over N(v) at least -threshold.
    """
    if threshold < 0:
        raise ParameterError(f"threshold must be >= 0, got {threshold}")
    hat1 = step(g, hat0)
    sums = g.neighbor_sums(hat1.labels)
    members = np.flatnonzero(sums >= -threshold)
    return AlmostRedReport(
        threshold=int(threshold),
        members=members,
        count=int(members.size),
        excess=float(members.size - g.n / 2.0),
    )


def flipping_set(g: Graph, scenario: DefectorScenario) -> np.ndarray:
    """Vertices Blue on day 1 of the balanced run but Red once defectors flip."""
    if scenario.hat_coloring.n != g.n:
        raise ValidationError("scenario size does not match graph")
    hat1 = step(g, scenario.hat_coloring)
    day1 = step(g, scenario.coloring)
    return np.flatnonzero((hat1.labels == BLUE) & (day1.labels == RED))


def vulnerable_set(g: Graph, scenario: DefectorScenario) -> np.ndarray:
    """Vertices with equal Red and non-swing-Blue neighbor counts and a swing neighbor.

    Such a vertex sees a strict Blue majority before the defection and
    a strict Red majority after it, so it always flips.
    """
    if scenario.hat_coloring.n != g.n:
        raise ValidationError("scenario size does not match graph")
    hat = scenario.hat_coloring.labels
    in_swing = np.zeros(g.n, dtype=bool)
    in_swing[scenario.swing_set] = True
    red_deg = g.neighbor_sums(hat == RED)
    non_swing_blue_deg = g.neighbor_sums((hat == BLUE) & ~in_swing)
    swing_deg = g.neighbor_sums(in_swing)
    return np.flatnonzero((red_deg == non_swing_blue_deg) & (swing_deg >= 1))


@dataclass(frozen=True)
class RegularityReport:
    """Raw neighborhood statistics with per-condition pass flags.

    ``sizes`` and ``norms`` carry the measured values, ``conditions``
    one boolean per threshold test; ``regular`` is their conjunction.
    """

    vertex: int
    pair: Optional[int]
    sizes: dict
    norms: dict
    conditions: dict
    regular: bool


def _induced_signed_degrees(g: Graph, labels: np.ndarray, members: np.ndarray) -> np.ndarray:
    """Signed neighbor counts inside the subgraph induced by ``members``.

    For each u in members: (Red neighbors of u inside members) minus
    (Blue neighbors of u inside members), edges leaving the set ignored.
    """
    k = members.size
    if k == 0:
        return np.zeros(0, dtype=np.int64)
    in_set = np.zeros(g.n, dtype=bool)
    in_set[members] = True
    starts = g.indptr[members]
    lengths = g.indptr[members + 1] - starts
    gathered = np.concatenate(
        [g.indices[s:s + l] for s, l in zip(starts, lengths)]
    ) if lengths.sum() else np.zeros(0, dtype=np.int32)
    vals = np.where(in_set[gathered], labels[gathered], 0).astype(np.int64)
    out = np.zeros(k, dtype=np.int64)
    nonempty = np.flatnonzero(lengths)
    if nonempty.size:
        offsets = np.concatenate([[0], np.cumsum(lengths)])[:-1]
        sums = np.add.reduceat(vals, offsets[nonempty])
        out[nonempty] = sums
    return out


def _window_conditions(prefix: str, plus: int, minus: int, center: float, width: float, conditions: dict):
    conditions[f"{prefix}_plus_window"] = abs(plus - center) <= width
    conditions[f"{prefix}_minus_window"] = abs(minus - center) <= width


def regularity_report(
    g: Graph,
    hat0: Coloring,
    v: int,
    p: float,
    pair: Optional[int] = None,
) -> RegularityReport:
    """Evaluate the neighborhood regularity conditions at vertex ``v``.

    ``p`` is the model edge density (a parameter of the thresholds, not
    inferred from the sampled graph). All logarithms are natural. The
    single-vertex form examines U = N(v); the pair form partitions the
    joint neighborhood of v and ``pair`` into exclusive and shared
    parts and additionally caps the shared part at log n.
    """
    if g.n < 3:
        raise ParameterError("regularity thresholds need n >= 3")
    if not 0.0 < p <= 1.0:
        raise ParameterError(f"p must lie in (0, 1], got {p}")
    if hat0.n != g.n:
        raise ValidationError("coloring size does not match graph")
    if not 0 <= v < g.n:
        raise ParameterError(f"vertex {v} out of range [0, {g.n})")

    log_n = math.log(g.n)
    pn = p * g.n
    center = pn / 2.0
    width = 3.0 * math.sqrt(pn * log_n)
    labels = hat0.labels
    conditions: dict = {}

    if pair is None:
        members = np.setdiff1d(g.neighbors(v), [v], assume_unique=True)
        d_vec = _induced_signed_degrees(g, labels, members)
        plus = int(np.count_nonzero(labels[members] == RED))
        minus = int(members.size - plus)
        d_inf = float(np.abs(d_vec).max()) if d_vec.size else 0.0
        d_l2 = float(math.sqrt(int((d_vec * d_vec).sum()))) if d_vec.size else 0.0
        d_sum = float(abs(int(d_vec.sum()))) if d_vec.size else 0.0
        _window_conditions("u", plus, minus, center, width, conditions)
        conditions["d_inf"] = d_inf <= log_n
        conditions["d_sum"] = d_sum <= 5.0 * log_n
        conditions["d_l2"] = d_l2 <= width
        sizes = {"u_plus": plus, "u_minus": minus}
        norms = {"d_inf": d_inf, "d_l2": d_l2, "d_sum_abs": d_sum}
    else:
        pair = int(pair)
        if pair == v or not 0 <= pair < g.n:
            raise ParameterError(f"pair vertex {pair} invalid for v={v}")
        n1 = np.setdiff1d(g.neighbors(v), [v, pair], assume_unique=True)
        n2 = np.setdiff1d(g.neighbors(pair), [v, pair], assume_unique=True)
        shared = np.intersect1d(n1, n2, assume_unique=True)
        members = np.union1d(n1, n2)
        d_vec = _induced_signed_degrees(g, labels, members)
        pos_in_members = {int(u): i for i, u in enumerate(members)}
        idx1 = np.asarray([pos_in_members[int(u)] for u in n1], dtype=np.int64)
        idx2 = np.asarray([pos_in_members[int(u)] for u in n2], dtype=np.int64)

        def split(verts):
            plus = int(np.count_nonzero(labels[verts] == RED))
            return plus, int(verts.size - plus)

        u13_plus, u13_minus = split(n1)
        u23_plus, u23_minus = split(n2)
        u3_plus, u3_minus = split(shared)
        d_inf = float(np.abs(d_vec).max()) if d_vec.size else 0.0
        d_l2 = float(math.sqrt(int((d_vec * d_vec).sum()))) if d_vec.size else 0.0
        d13_sum = float(abs(int(d_vec[idx1].sum()))) if idx1.size else 0.0
        d23_sum = float(abs(int(d_vec[idx2].sum()))) if idx2.size else 0.0
        _window_conditions("u13", u13_plus, u13_minus, center, width, conditions)
        _window_conditions("u23", u23_plus, u23_minus, center, width, conditions)
        conditions["u3_plus_cap"] = u3_plus <= log_n
        conditions["u3_minus_cap"] = u3_minus <= log_n
        conditions["d_inf"] = d_inf <= log_n
        conditions["d_l2"] = d_l2 <= width
        conditions["d13_sum"] = d13_sum <= 5.0 * log_n
        conditions["d23_sum"] = d23_sum <= 5.0 * log_n
        sizes = {
            "u13_plus": u13_plus,
            "u13_minus": u13_minus,
            "u23_plus": u23_plus,
            "u23_minus": u23_minus,
            "u3_plus": u3_plus,
            "u3_minus": u3_minus,
        }
        norms = {
            "d_inf": d_inf,
            "d_l2": d_l2,
            "d13_sum_abs": d13_sum,
            "d23_sum_abs": d23_sum,
        }

    return RegularityReport(
        vertex=int(v),
        pair=pair,
        sizes=sizes,
        norms=norms,
        conditions=conditions,
        regular=all(conditions.values()),
    )

"""Monte Carlo orchestration: seeded trials, sweeps, threshold search.

Every trial is an independent (graph, coloring, run) pipeline. Trial i
of an experiment uses the derived seed ``mix64(master_seed, i)``, from
which the graph and coloring seeds are derived in turn, so results are
a pure function of the master seed: execution order, chunking and the
worker count never change them. Aggregation is a commutative fold over
per-trial records.
"""

from __future__ import annotations

import csv
import math
import multiprocessing
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bounds import DEFAULT_CONSTANTS, ConstantsConfig
from .coloring import balanced_with_defectors, fixed_advantage, random_half
from .dynamics import OutcomeKind, Trajectory, run
from .errors import BracketingError, ConfigError, ParameterError
from .graphs import ModelParams, generate_gnp

__all__ = [
    "SCHEMES",
    "mix64",
    "ExperimentConfig",
    "TrialRecord",
    "TrialSummary",
    "run_trials",
    "sweep",
    "threshold_bisect",
    "ScalingFit",
    "scaling_fit",
    "wilson_interval",
    "CSV_COLUMNS",
    "summary_row",
]

SCHEMES = ("fixed_advantage", "random_half", "balanced_defectors")

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# sub-stream tags for per-trial seed derivation
_GRAPH_STREAM = 1
_COLORING_STREAM = 2

CSV_COLUMNS = [
    "n", "p", "delta", "scheme", "trials",
    "red_wins", "blue_wins", "stable", "two_cycles", "day_capped",
    "win_prob", "ci_low", "ci_high",
    "mean_days", "max_days_observed", "mean_delta2", "seed",
]


def mix64(key: int, index: int) -> int:
    """Derive the ``index``-th 64-bit stream seed from ``key``.

    One output step of the splitmix64 generator evaluated at state
    key + (index + 1) * golden_gamma, i.e. ``mix64(0, i)`` equals the
    (i+1)-th output of splitmix64 seeded with 0 (first output
    0xE220A8397B1DCDAF).
    """
    z = (int(key) + (int(index) + 1) * _GOLDEN) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo experiment: model parameters plus orchestration."""

    params: ModelParams
    scheme: str
    trials: int
    max_days: Optional[int] = None
    store_colorings: bool = False
    workers: int = 1
    constants: ConstantsConfig = DEFAULT_CONSTANTS

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.max_days is not None and self.max_days < 1:
            raise ConfigError(f"max_days must be >= 1, got {self.max_days}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.scheme != "random_half" and self.params.delta > self.params.n // 2:
            raise ConfigError(
                f"delta={self.params.delta} infeasible for scheme {self.scheme} at n={self.params.n}"
            )


@dataclass(eq=False)
class TrialRecord:
    """One trial: its derived seed and the resulting trajectory."""

    index: int
    seed: int
    trajectory: Trajectory

    @property
    def outcome_kind(self) -> OutcomeKind:
        return self.trajectory.outcome.kind

    def effective_day(self) -> int:
        """Outcome day for decided runs, last simulated day for capped ones."""
        day = self.trajectory.outcome.day
        return self.trajectory.days_elapsed if day is None else day

    def day2_advantage(self) -> float:
        """Day-2 advantage; terminal states are fixed points, so runs that
        ended earlier report their final advantage."""
        days = self.trajectory.days
        return days[2].delta if len(days) > 2 else days[-1].delta


@dataclass(eq=False)
class TrialSummary:
    """Order-independent aggregate of an experiment's trial records."""

    trials: int
    counts: dict
    win_probability: float
    ci_low: float
    ci_high: float
    day_histogram: dict
    mean_days: float
    max_days_observed: int
    mean_delta2: float
    records: list = field(repr=False)

    @classmethod
    def aggregate(cls, records: list) -> "TrialSummary":
        trials = len(records)
        counts = {
            "red_wins": 0,
            "blue_wins": 0,
            "stable_non_unanimous": 0,
            "two_cycles": 0,
            "day_capped": 0,
        }
        keymap = {
            OutcomeKind.RED_WIN: "red_wins",
            OutcomeKind.BLUE_WIN: "blue_wins",
            OutcomeKind.STABLE_NON_UNANIMOUS: "stable_non_unanimous",
            OutcomeKind.TWO_CYCLE: "two_cycles",
            OutcomeKind.DAY_CAP_REACHED: "day_capped",
        }
        hist: dict = {}
        total_days = 0
        max_days = 0
        total_delta2 = 0.0
        for rec in records:
            counts[keymap[rec.outcome_kind]] += 1
            day = rec.effective_day()
            hist[day] = hist.get(day, 0) + 1
            total_days += day
            max_days = max(max_days, rec.trajectory.days_elapsed)
            total_delta2 += rec.day2_advantage()
        wins = counts["red_wins"]
        low, high = wilson_interval(wins, trials)
        return cls(
            trials=trials,
            counts=counts,
            win_probability=wins / trials,
            ci_low=low,
            ci_high=high,
            day_histogram={k: hist[k] for k in sorted(hist)},
            mean_days=total_days / trials,
            max_days_observed=max_days,
            mean_delta2=total_delta2 / trials,
            records=sorted(records, key=lambda r: r.index),
        )


def _execute_trial(spec) -> TrialRecord:
    index, trial_seed, n, p, delta, scheme, max_days, store_colorings = spec
    graph = generate_gnp(n, p, mix64(trial_seed, _GRAPH_STREAM))
    color_seed = mix64(trial_seed, _COLORING_STREAM)
    if scheme == "fixed_advantage":
        c0 = fixed_advantage(n, delta, color_seed)
    elif scheme == "random_half":
        c0 = random_half(n, color_seed)
    else:
        c0 = balanced_with_defectors(n, delta, color_seed).coloring
    trajectory = run(graph, c0, max_days=max_days, store_colorings=store_colorings)
    return TrialRecord(index=index, seed=trial_seed, trajectory=trajectory)


def run_trials(cfg: ExperimentConfig) -> TrialSummary:
    """Run the configured trials and aggregate them.

    Deterministic in the master seed; the worker count only affects
    wall-clock time.
    """
    params = cfg.params
    specs = [
        (
            i,
            mix64(params.seed, i),
            params.n,
            params.p,
            params.delta,
            cfg.scheme,
            cfg.max_days,
            cfg.store_colorings,
        )
        for i in range(cfg.trials)
    ]
    workers = min(cfg.workers, cfg.trials)
    if workers <= 1:
        records = [_execute_trial(s) for s in specs]
    else:
        chunk = max(1, cfg.trials // (workers * 4))
        with multiprocessing.Pool(workers) as pool:
            records = pool.map(_execute_trial, specs, chunksize=chunk)
    return TrialSummary.aggregate(records)


def summary_row(cfg: ExperimentConfig, summary: TrialSummary) -> dict:
    """Flatten a summary into the fixed sweep CSV schema."""
    return {
        "n": cfg.params.n,
        "p": repr(float(cfg.params.p)),
        "delta": cfg.params.delta,
        "scheme": cfg.scheme,
        "trials": cfg.trials,
        "red_wins": summary.counts["red_wins"],
        "blue_wins": summary.counts["blue_wins"],
        "stable": summary.counts["stable_non_unanimous"],
        "two_cycles": summary.counts["two_cycles"],
        "day_capped": summary.counts["day_capped"],
        "win_prob": summary.win_probability,
        "ci_low": summary.ci_low,
        "ci_high": summary.ci_high,
        "mean_days": summary.mean_days,
        "max_days_observed": summary.max_days_observed,
        "mean_delta2": summary.mean_delta2,
        "seed": cfg.params.seed,
    }


def _row_key(row: dict) -> tuple:
    return tuple(str(row[k]) for k in ("n", "p", "delta", "scheme", "trials", "seed"))


def sweep(configs: list, out_path=None, workers: Optional[int] = None) -> list:
    """Run one summary row per config, optionally appending to a CSV.

    Rows already present in ``out_path`` (matched on the n, p, delta,
    scheme, trials, seed key) are reused instead of recomputed, and
    each freshly computed row is flushed immediately, so an interrupted
    sweep resumes where it stopped.
    """
    configs = list(configs)
    if not configs:
        raise ConfigError("sweep needs a non-empty config grid")
    done = {}
    if out_path is not None and os.path.exists(out_path):
        with open(out_path, "r", newline="", encoding="ascii") as fh:
            for row in csv.DictReader(fh):
                done[_row_key(row)] = row
    rows = []
    writer = None
    out_fh = None
    try:
        if out_path is not None:
            fresh = not os.path.exists(out_path) or os.path.getsize(out_path) == 0
            out_fh = open(out_path, "a", newline="", encoding="ascii")
            writer = csv.DictWriter(out_fh, fieldnames=CSV_COLUMNS)
            if fresh:
                writer.writeheader()
                out_fh.flush()
        for cfg in configs:
            if workers is not None:
                cfg = ExperimentConfig(
                    params=cfg.params,
                    scheme=cfg.scheme,
                    trials=cfg.trials,
                    max_days=cfg.max_days,
                    store_colorings=cfg.store_colorings,
                    workers=workers,
                    constants=cfg.constants,
                )
            key = _row_key({
                "n": cfg.params.n, "p": repr(float(cfg.params.p)), "delta": cfg.params.delta,
                "scheme": cfg.scheme, "trials": cfg.trials, "seed": cfg.params.seed,
            })
            if key in done:
                rows.append(dict(done[key]))
                continue
            row = summary_row(cfg, run_trials(cfg))
            rows.append(row)
            done[key] = row
            if writer is not None:
                writer.writerow(row)
                out_fh.flush()
    finally:
        if out_fh is not None:
            out_fh.close()
    return rows


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple:
    """95% Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    if not 0 <= successes <= trials:
        raise ParameterError(f"successes must lie in [0, trials], got {successes}")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def threshold_bisect(
    n: int,
    p: float,
    target_prob: float,
    trials_per_point: int,
    seed: int,
    max_days: Optional[int] = None,
    delta_hi: Optional[int] = None,
    workers: int = 1,
) -> int:
    """Smallest tested advantage whose estimated Red-win probability
    reaches ``target_prob``, by bisection on integer delta in
    (0, delta_hi].

    Win probability is nondecreasing in delta (larger Red starts
    dominate smaller ones coordinatewise), so bisection applies. Each
    probe spends ``trials_per_point`` fresh trials seeded by
    mix64(seed, delta); no samples are reused between probes. delta = 0
    is assumed failing and never probed. Raises BracketingError with
    diagnostics if even delta_hi (default n // 2) misses the target.
    """
    if not 0.0 < target_prob < 1.0:
        raise ParameterError(f"target_prob must lie in (0, 1), got {target_prob}")
    if trials_per_point < 1:
        raise ParameterError(f"trials_per_point must be >= 1, got {trials_per_point}")
    if delta_hi is None:
        delta_hi = n // 2
    if not 1 <= delta_hi <= n // 2:
        raise ParameterError(f"delta_hi must lie in [1, n//2], got {delta_hi}")

    def probe(delta: int) -> float:
        cfg = ExperimentConfig(
            params=ModelParams(n=n, p=p, delta=delta, seed=mix64(seed, delta)),
            scheme="fixed_advantage",
            trials=trials_per_point,
            max_days=max_days,
            workers=workers,
        )
        return run_trials(cfg).win_probability

    hi = delta_hi
    hi_prob = probe(hi)
    if hi_prob < target_prob:
        raise BracketingError(
            f"red-win probability {hi_prob:.4f} at delta={hi} is below the "
            f"target {target_prob}; the target is not bracketed on (0, {hi}]",
            diagnostics={
                "n": n,
                "p": p,
                "delta_hi": hi,
                "win_probability_at_hi": hi_prob,
                "trials_per_point": trials_per_point,
            },
        )
    lo = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if probe(mid) >= target_prob:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r_squared: float


def scaling_fit(points: list) -> ScalingFit:
    """Least-squares line through (log x, log y) for positive pairs.

    A perfectly flat target (zero residuals on zero spread) reports
    r_squared = 1.0.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise ParameterError(f"scaling_fit needs >= 2 points, got {len(pts)}")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ParameterError("scaling_fit needs strictly positive coordinates")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    residuals = ly - (slope * lx + intercept)
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res < 1e-24 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return ScalingFit(slope=float(slope), intercept=float(intercept), r_squared=r2)

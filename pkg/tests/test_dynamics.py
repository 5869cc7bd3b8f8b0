import numpy as np
import pytest

from majoritylab import (
    Coloring,
    DaySummary,
    ExperimentConfig,
    ModelParams,
    Outcome,
    OutcomeKind,
    ParameterError,
    Trajectory,
    ValidationError,
    balanced_with_defectors,
    fixed_advantage,
    from_edge_list,
    generate_gnp,
    landslide_profile,
    random_half,
    run,
    run_trials,
    step,
)
from conftest import coloring_of


def test_step_c4_alternating(c4):
    out = step(c4, coloring_of(1, -1, 1, -1))
    assert list(out.labels) == [-1, 1, -1, 1]


def test_step_isolated_vertices_tie():
    g = generate_gnp(6, 0.0, seed=0)
    c = coloring_of(1, -1, 1, 1, -1, -1)
    assert step(g, c).same_as(c)


def test_step_k5_majority(k5):
    out = step(k5, coloring_of(1, 1, 1, -1, -1))
    assert out.red_count == 5


def test_step_does_not_mutate_input(k5):
    c = coloring_of(1, 1, 1, -1, -1)
    before = c.labels.copy()
    step(k5, c)
    assert np.array_equal(c.labels, before)


def test_step_size_mismatch(k5):
    with pytest.raises(ValidationError):
        step(k5, coloring_of(1, -1))


def test_run_k5_red_win_day1(k5):
    traj = run(k5, coloring_of(1, 1, 1, -1, -1))
    assert traj.outcome.kind == OutcomeKind.RED_WIN
    assert traj.outcome.day == 1
    assert traj.days_elapsed == 1
    assert [d.t for d in traj.days] == [0, 1]


def test_run_c4_two_cycle(c4):
    traj = run(c4, coloring_of(1, -1, 1, -1))
    assert traj.outcome.kind == OutcomeKind.TWO_CYCLE
    assert traj.outcome.day <= 2
    first, second = traj.outcome.cycle
    # the pair alternates: stepping one gives the other, and they differ
    assert step(c4, first).same_as(second)
    assert step(c4, second).same_as(first)
    assert not first.same_as(second)


def test_run_empty_graph_stable_day0():
    g = generate_gnp(5, 0.0, seed=0)
    traj = run(g, coloring_of(1, 1, 1, -1, -1))
    assert traj.outcome.kind == OutcomeKind.STABLE_NON_UNANIMOUS
    assert traj.outcome.day == 0


def test_run_unanimous_start(k5):
    traj = run(k5, coloring_of(1, 1, 1, 1, 1))
    assert traj.outcome.kind == OutcomeKind.RED_WIN
    assert traj.outcome.day == 0
    traj = run(k5, coloring_of(-1, -1, -1, -1, -1))
    assert traj.outcome.kind == OutcomeKind.BLUE_WIN


def test_run_day_cap(c4):
    traj = run(c4, coloring_of(1, -1, 1, -1), max_days=1)
    assert traj.outcome.kind == OutcomeKind.DAY_CAP_REACHED
    assert traj.outcome.day is None
    assert traj.days_elapsed == 1
    with pytest.raises(ParameterError):
        run(c4, coloring_of(1, -1, 1, -1), max_days=0)


def test_trajectory_bookkeeping():
    g = generate_gnp(60, 0.1, seed=3)
    c0 = random_half(60, seed=4)
    traj = run(g, c0, store_colorings=True)
    assert [d.t for d in traj.days] == list(range(len(traj.days)))
    for d, c in zip(traj.days, traj.colorings):
        assert d.red + d.blue == 60
        assert d.delta == (d.red - d.blue) / 2
        assert c.red_count == d.red


def test_periodicity_small_instances():
    rng = np.random.default_rng(17)
    for i in range(120):
        n = int(rng.integers(10, 121))
        p = [0.02, 0.1, 0.35][i % 3]
        g = generate_gnp(n, p, seed=int(rng.integers(2**63)))
        c0 = random_half(n, seed=int(rng.integers(2**63)))
        traj = run(g, c0, max_days=n + 2)
        assert traj.outcome.kind != OutcomeKind.DAY_CAP_REACHED


def test_color_symmetry():
    # negating every starting label negates the whole trajectory
    rng = np.random.default_rng(5)
    for _ in range(25):
        n = int(rng.integers(10, 80))
        g = generate_gnp(n, 0.15, seed=int(rng.integers(2**63)))
        c0 = random_half(n, seed=int(rng.integers(2**63)))
        a = run(g, c0, max_days=40, store_colorings=True)
        b = run(g, c0.negate(), max_days=40, store_colorings=True)
        assert len(a.days) == len(b.days)
        for ca, cb in zip(a.colorings, b.colorings):
            assert np.array_equal(ca.labels, -cb.labels)


def test_monotone_coupling():
    # raising some labels Blue -> Red never lowers any vertex on any day
    rng = np.random.default_rng(11)
    for _ in range(40):
        n = int(rng.integers(10, 90))
        g = generate_gnp(n, 0.2, seed=int(rng.integers(2**63)))
        lo = random_half(n, seed=int(rng.integers(2**63)))
        flips = np.flatnonzero((lo.labels == -1) & (rng.random(n) < 0.3))
        hi = lo.flip(flips)
        a, b = lo, hi
        for _ in range(15):
            assert np.all(a.labels <= b.labels)
            a, b = step(g, a), step(g, b)


def test_relabeling_equivariance():
    rng = np.random.default_rng(23)
    n = 50
    g = generate_gnp(n, 0.15, seed=9)
    c0 = random_half(n, seed=10)
    perm = rng.permutation(n)
    # permuted graph: edge (u, v) becomes (perm[u], perm[v])
    edges = []
    for v in range(n):
        for u in g.neighbors(v):
            if v < u:
                edges.append((int(perm[v]), int(perm[u])))
    g_perm = from_edge_list(n, edges)
    labels_perm = np.empty(n, dtype=np.int8)
    labels_perm[perm] = c0.labels
    a = run(g, c0, max_days=30, store_colorings=True)
    b = run(g_perm, Coloring(labels_perm), max_days=30, store_colorings=True)
    assert a.outcome.kind == b.outcome.kind
    assert len(a.days) == len(b.days)
    for ca, cb in zip(a.colorings, b.colorings):
        assert np.array_equal(ca.labels, cb.labels[perm])


def test_run_deterministic():
    g = generate_gnp(70, 0.12, seed=2)
    c0 = random_half(70, seed=3)
    a = run(g, c0, store_colorings=True)
    b = run(g, c0, store_colorings=True)
    assert a.outcome.kind == b.outcome.kind and a.outcome.day == b.outcome.day
    assert a.days == b.days
    for ca, cb in zip(a.colorings, b.colorings):
        assert ca.same_as(cb)


def _trajectory_with_blue(n, blues):
    days = [
        DaySummary(t=t, red=n - b, blue=b, delta=(n - 2 * b) / 2)
        for t, b in enumerate(blues)
    ]
    outcome = Outcome(OutcomeKind.RED_WIN, len(blues) - 1)
    return Trajectory(days=days, outcome=outcome, days_elapsed=len(blues) - 1)


def test_landslide_profile_frozen_ratios():
    # consecutive Blue counts 5 -> 1 -> 0 from day 3 give ratios [0.2, 0.0]
    traj = _trajectory_with_blue(100, [50, 30, 12, 5, 1, 0])
    rows = landslide_profile(traj, p=0.02)
    assert [r.day for r in rows] == [3, 4]
    assert [r.ratio for r in rows] == [0.2, 0.0]
    assert all(r.bound == pytest.approx(100 / 2.0) for r in rows)
    assert not any(r.violates for r in rows)


def test_landslide_profile_stops_at_quarter_pn():
    # pn/4 = 5: day 4's count 4 <= 5 ends the profile
    traj = _trajectory_with_blue(100, [50, 30, 12, 7, 4, 1, 0])
    rows = landslide_profile(traj, p=0.2)
    assert [r.day for r in rows] == [3]


def test_landslide_profile_flags_violations():
    traj = _trajectory_with_blue(100, [50, 40, 30, 20, 19, 0])
    rows = landslide_profile(traj, p=0.02, shrink_constant=1.0)
    assert rows[0].violates  # 19/20 > 1/(pn) = 0.5


def test_landslide_profile_short_and_all_red():
    assert landslide_profile(_trajectory_with_blue(100, [50, 20, 5, 1]), p=0.02) == []
    assert landslide_profile(_trajectory_with_blue(100, [0]), p=0.02) == []


@pytest.mark.slow
def test_landslide_collapse_rate_mc():
    # with a solid advantage the losing side shrinks at least as fast as
    # the 100/(pn) factor on at least 95% of winning runs
    n, p, delta = 30000, 0.02, 500
    cfg = ExperimentConfig(
        params=ModelParams(n=n, p=p, delta=delta, seed=606),
        scheme="fixed_advantage",
        trials=40,
    )
    summary = run_trials(cfg)
    red_wins = [r for r in summary.records if r.outcome_kind == OutcomeKind.RED_WIN]
    assert len(red_wins) >= 38
    clean = sum(
        1
        for rec in red_wins
        if not any(row.violates for row in landslide_profile(rec.trajectory, p))
    )
    assert clean / len(red_wins) >= 0.95


def test_to_json_dict():
    traj = _trajectory_with_blue(10, [5, 0])
    payload = traj.to_json_dict(params={"n": 10}, seed=7)
    assert payload["outcome"] == {"type": "red_win", "day": 1}
    assert payload["days"][0] == {"t": 0, "red": 5, "blue": 5, "delta": 0.0}
    assert payload["seed"] == 7

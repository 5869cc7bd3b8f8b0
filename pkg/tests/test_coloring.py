import math

import numpy as np
import pytest
from scipy.stats import chisquare

from majoritylab import (
    Coloring,
    ParameterError,
    ValidationError,
    balanced_with_defectors,
    dump_coloring,
    fixed_advantage,
    load_coloring,
    random_half,
)


@pytest.mark.parametrize("n,delta,red", [(10, 0, 5), (10, 2, 7), (11, 1, 7), (11, 0, 6)])
def test_fixed_advantage_counts(n, delta, red):
    c = fixed_advantage(n, delta, seed=1)
    assert c.red_count == red
    assert c.blue_count == n - red
    assert set(np.unique(c.labels)) <= {-1, 1}


def test_fixed_advantage_infeasible():
    with pytest.raises(ParameterError):
        fixed_advantage(10, 6, seed=1)
    with pytest.raises(ParameterError):
        fixed_advantage(10, -1, seed=1)


def test_non_integer_delta_rejected():
    with pytest.raises(ParameterError):
        fixed_advantage(10, 2.5, seed=1)
    with pytest.raises(ParameterError):
        balanced_with_defectors(10, 1.5, seed=1)
    assert fixed_advantage(10, 2.0, seed=1).red_count == 7


def test_fixed_advantage_red_set_varies():
    reds = {tuple(fixed_advantage(12, 2, seed).red_vertices()) for seed in range(30)}
    assert len(reds) > 1


def test_random_half_empty_and_deterministic():
    assert random_half(0, seed=5).n == 0
    a = random_half(40, seed=9)
    b = random_half(40, seed=9)
    assert a.same_as(b)
    assert not a.same_as(random_half(40, seed=10))


@pytest.mark.slow
def test_random_half_balance_clt():
    # mean of (red_count - n/2) over many draws, within 5 standard errors
    n, trials = 100, 100_000
    total = 0
    for seed in range(trials):
        total += random_half(n, seed).red_count - n // 2
    tolerance = 5 * (math.sqrt(n) / 2) / math.sqrt(trials)
    assert abs(total / trials) <= tolerance


def test_balanced_with_defectors_structure():
    scen = balanced_with_defectors(10, 3, seed=4)
    assert scen.hat_coloring.red_count == 5
    assert scen.delta == 3
    assert scen.coloring.red_count == 8
    # swing vertices are Blue in the balanced coloring, Red afterwards
    assert np.all(scen.hat_coloring.labels[scen.swing_set] == -1)
    assert np.all(scen.coloring.labels[scen.swing_set] == 1)


def test_balanced_with_defectors_infeasible():
    with pytest.raises(ParameterError):
        balanced_with_defectors(10, 6, seed=1)


def test_scenario_flip_roundtrip():
    scen = balanced_with_defectors(31, 7, seed=12)
    assert scen.hat_coloring.flip(scen.swing_set).same_as(scen.coloring)
    assert scen.coloring.flip(scen.swing_set).same_as(scen.hat_coloring)


def test_scenario_validation_rejects_tampering():
    scen = balanced_with_defectors(10, 2, seed=3)
    from majoritylab import DefectorScenario

    with pytest.raises(ValidationError):
        DefectorScenario(
            hat_coloring=scen.hat_coloring,
            swing_set=scen.swing_set,
            coloring=scen.hat_coloring,  # not the flipped coloring
        )


def test_defector_distribution_uniform_small():
    # at n=4, delta=1 the resulting coloring is uniform over the four
    # 3-Red supports, the same law as fixed_advantage(4, 1)
    counts_scen = {}
    counts_fixed = {}
    samples = 20_000
    for seed in range(samples):
        key = tuple(balanced_with_defectors(4, 1, seed).coloring.red_vertices())
        counts_scen[key] = counts_scen.get(key, 0) + 1
        key = tuple(fixed_advantage(4, 1, seed + samples).red_vertices())
        counts_fixed[key] = counts_fixed.get(key, 0) + 1
    assert len(counts_scen) == 4 and len(counts_fixed) == 4
    assert chisquare(sorted(counts_scen.values())).pvalue > 0.01
    assert chisquare(sorted(counts_fixed.values())).pvalue > 0.01


def test_labels_validation():
    with pytest.raises(ValidationError):
        Coloring(np.array([1, 0, -1], dtype=np.int8))


def test_advantage_and_negate():
    c = Coloring(np.array([1, 1, 1, -1], dtype=np.int8))
    assert c.advantage == 1.0
    assert c.negate().advantage == -1.0
    assert c.negate().negate().same_as(c)


def test_letters_roundtrip(tmp_path):
    c = fixed_advantage(9, 2, seed=8)
    text = c.to_letters()
    assert len(text) == 9 and set(text) <= {"R", "B"}
    assert Coloring.from_letters(text).same_as(c)
    path = tmp_path / "coloring.txt"
    dump_coloring(c, path)
    assert load_coloring(path).same_as(c)
    with pytest.raises(ValidationError):
        Coloring.from_letters("RBX")

import math

import numpy as np
import pytest

from majoritylab import (
    ModelParams,
    ParameterError,
    ValidationError,
    dump_edge_list,
    from_edge_list,
    generate_gnp,
    graph_stats,
    load_edge_list,
)


def test_complete_graph_forced():
    g = generate_gnp(5, 1.0, seed=123)
    assert g.edge_count == 10
    assert all(g.degree(v) == 4 for v in range(5))
    g.validate()


def test_zero_probability_empty():
    g = generate_gnp(7, 0.0, seed=99)
    assert g.edge_count == 0
    g.validate()


def test_edge_count_window():
    # mean p*C(2000,2) = 19990; five-sigma window on the binomial count
    g = generate_gnp(2000, 0.01, seed=42)
    mean = 0.01 * 2000 * 1999 / 2
    assert abs(g.edge_count - mean) <= 5 * math.sqrt(mean)


def test_generation_deterministic():
    a = generate_gnp(500, 0.03, seed=7)
    b = generate_gnp(500, 0.03, seed=7)
    assert a.indptr.tobytes() == b.indptr.tobytes()
    assert a.indices.tobytes() == b.indices.tobytes()
    c = generate_gnp(500, 0.03, seed=8)
    assert c.indices.tobytes() != a.indices.tobytes()


@pytest.mark.parametrize("n,p", [(1, 0.5), (2, 0.5), (57, 0.08), (200, 0.5), (300, 0.97), (64, 1.0)])
def test_generated_invariants(n, p):
    for seed in range(3):
        generate_gnp(n, p, seed).validate()


def test_p_out_of_range():
    with pytest.raises(ParameterError):
        generate_gnp(10, -0.1, seed=0)
    with pytest.raises(ParameterError):
        generate_gnp(10, 1.5, seed=0)


@pytest.mark.slow
def test_degree_is_binomial_mean():
    # degree of vertex 0 ~ Bin(n-1, p); sample mean within 5 standard errors
    n, p, samples = 30, 0.25, 10_000
    total = sum(generate_gnp(n, p, seed).degree(0) for seed in range(samples))
    mean = total / samples
    se = math.sqrt((n - 1) * p * (1 - p) / samples)
    assert abs(mean - (n - 1) * p) <= 5 * se


def test_from_edge_list_path():
    g = from_edge_list(3, [(0, 1), (1, 2)])
    assert [g.degree(v) for v in range(3)] == [1, 2, 1]
    g.validate()


def test_from_edge_list_orientation_normalized():
    g = from_edge_list(4, [(2, 0), (3, 1)])
    assert list(g.neighbors(0)) == [2]
    assert list(g.neighbors(1)) == [3]


@pytest.mark.parametrize(
    "n,edges",
    [
        (2, [(0, 0)]),
        (4, [(0, 1), (1, 0)]),
        (4, [(0, 1), (0, 1)]),
        (3, [(0, 3)]),
        (3, [(-1, 0)]),
    ],
)
def test_from_edge_list_rejects(n, edges):
    with pytest.raises(ValidationError):
        from_edge_list(n, edges)


def test_graph_stats_cases(k5, path3):
    assert graph_stats(k5) == {
        "edge_count": 10,
        "min_degree": 4,
        "max_degree": 4,
        "mean_degree": 4.0,
    }
    empty = generate_gnp(7, 0.0, seed=1)
    assert graph_stats(empty) == {
        "edge_count": 0,
        "min_degree": 0,
        "max_degree": 0,
        "mean_degree": 0.0,
    }
    stats = graph_stats(path3)
    assert stats["edge_count"] == 2
    assert stats["min_degree"] == 1
    assert stats["max_degree"] == 2
    assert stats["mean_degree"] == pytest.approx(4 / 3)


def test_neighbor_sums_matches_bruteforce():
    g = generate_gnp(80, 0.1, seed=3)
    rng = np.random.default_rng(0)
    vals = rng.integers(-3, 4, size=80).astype(np.int32)
    sums = g.neighbor_sums(vals)
    for v in range(80):
        assert sums[v] == vals[g.neighbors(v)].sum()


def test_neighbor_sums_shape_check():
    g = generate_gnp(10, 0.5, seed=1)
    with pytest.raises(ValidationError):
        g.neighbor_sums(np.ones(11, dtype=np.int32))


def test_dump_load_roundtrip(tmp_path):
    g = generate_gnp(60, 0.12, seed=5)
    path = tmp_path / "graph.txt"
    dump_edge_list(g, path)
    lines = path.read_text().splitlines()
    assert lines[0] == f"60 {g.edge_count}"
    u, v = lines[1].split()
    assert int(u) < int(v)
    loaded = load_edge_list(path)
    assert loaded.indptr.tobytes() == g.indptr.tobytes()
    assert loaded.indices.tobytes() == g.indices.tobytes()


def test_load_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3\n0 1\n")
    with pytest.raises(ValidationError):
        load_edge_list(path)


def test_model_params_validation():
    ModelParams(n=10, p=0.5, delta=5, seed=1)
    assert ModelParams(n=10, p=0.5, delta=2.0, seed=1).delta == 2
    with pytest.raises(ParameterError):
        ModelParams(n=10, p=1.5, delta=0, seed=1)
    with pytest.raises(ParameterError):
        ModelParams(n=10, p=0.5, delta=2.5, seed=1)
    with pytest.raises(ParameterError):
        ModelParams(n=10, p=0.5, delta=6, seed=1)
    with pytest.raises(ParameterError):
        ModelParams(n=-1, p=0.5, delta=0, seed=1)

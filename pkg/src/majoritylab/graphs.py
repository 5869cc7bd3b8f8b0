"""Erdos-Renyi generation and compressed adjacency storage.

Graphs are undirected, simple and immutable. Vertex ids are dense
integers ``[0, n)``. The adjacency is kept in compressed sparse row
form: ``indices[indptr[v]:indptr[v+1]]`` is the strictly sorted
neighbor list of ``v``.

Sampling G(n, p) never visits absent pairs: it jumps geometric gaps
along the lexicographic pair index, so the expected cost is O(n + m)
rather than O(n^2). The hot loops (gap walking and CSR assembly) are
numba kernels compiled once and cached on disk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numba import njit

from .errors import ParameterError, ValidationError

__all__ = [
    "Graph",
    "ModelParams",
    "generate_gnp",
    "from_edge_list",
    "graph_stats",
    "dump_edge_list",
    "load_edge_list",
]

_MASK64 = (1 << 64) - 1

# below this many pair draws the batching loop is pointless
_MIN_GAP_BATCH = 1024


def _as_seed(seed) -> int:
    return int(seed) & _MASK64


@dataclass(frozen=True)
class ModelParams:
    """Model parameters: population size n, edge density p, initial
    advantage delta (a vertex count, never rounded from a fraction) and
    the 64-bit master seed."""

    n: int
    p: float
    delta: int
    seed: int

    def __post_init__(self):
        if self.n < 0:
            raise ParameterError(f"n must be nonnegative, got {self.n}")
        if not 0.0 <= float(self.p) <= 1.0:
            raise ParameterError(f"p must lie in [0, 1], got {self.p}")
        delta = self.delta
        if isinstance(delta, float):
            if not delta.is_integer():
                raise ParameterError(f"delta must be an integer, got {delta}")
            object.__setattr__(self, "delta", int(delta))
        elif not isinstance(delta, (int, np.integer)):
            raise ParameterError(f"delta must be an integer, got {delta!r}")
        if not 0 <= self.delta <= self.n / 2:
            raise ParameterError(
                f"delta must lie in [0, n/2] = [0, {self.n / 2}], got {self.delta}"
            )


class Graph:
    """Immutable undirected simple graph in CSR adjacency form."""

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        indices = np.ascontiguousarray(indices, dtype=np.int32)
        if indptr.shape != (self.n + 1,):
            raise ValidationError("indptr must have length n + 1")
        if indptr[0] != 0 or indptr[-1] != indices.size:
            raise ValidationError("indptr does not span the indices array")
        indptr.flags.writeable = False
        indices.flags.writeable = False
        self.indptr = indptr
        self.indices = indices
        self._matrix = None

    @property
    def edge_count(self) -> int:
        return self.indices.size // 2

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor list of ``v`` (a read-only view)."""
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def adjacency_matrix(self) -> sp.csr_matrix:
        """Unit-weight scipy CSR view over the stored adjacency (built once)."""
        if self._matrix is None:
            indptr = self.indptr
            if self.indices.size < 2**31:
                indptr = indptr.astype(np.int32)
            data = np.ones(self.indices.size, dtype=np.int8)
            self._matrix = sp.csr_matrix(
                (data, self.indices, indptr), shape=(self.n, self.n)
            )
        return self._matrix

    def neighbor_sums(self, values: np.ndarray) -> np.ndarray:
        """Sum ``values`` over each vertex's neighborhood.

        Integer inputs stay in integer arithmetic (int32 accumulation),
        so sums over +-1 labels are exact.
        """
        values = np.asarray(values)
        if values.shape != (self.n,):
            raise ValidationError(
                f"values must have shape ({self.n},), got {values.shape}"
            )
        if values.dtype in (np.int8, np.int16, np.bool_):
            values = values.astype(np.int32)
        return self.adjacency_matrix() @ values

    def validate(self) -> None:
        """Walk all structural invariants; raise ValidationError on any breach."""
        if self.indices.size % 2 != 0:
            raise ValidationError("directed half-edges are unpaired")
        if self.indices.size:
            if self.indices.min() < 0 or self.indices.max() >= self.n:
                raise ValidationError("neighbor id out of range")
        deg = self.degrees()
        if np.any(deg < 0):
            raise ValidationError("indptr must be nondecreasing")
        row = np.repeat(np.arange(self.n, dtype=np.int32), deg)
        if np.any(row == self.indices):
            raise ValidationError("self-loop present")
        if self.indices.size > 1:
            increasing = self.indices[1:] > self.indices[:-1]
            boundary = np.zeros(self.indices.size - 1, dtype=bool)
            ends = self.indptr[1:-1]
            ends = ends[(ends > 0) & (ends < self.indices.size)]
            boundary[ends - 1] = True
            if not np.all(increasing | boundary):
                raise ValidationError("neighbor lists must be strictly sorted")
        mat = self.adjacency_matrix()
        if (mat != mat.T).nnz != 0:
            raise ValidationError("adjacency is not symmetric")

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


@njit(cache=True)
def _walk_gaps(us, log_q, total, k, cnt, u_out, v_out, row, row_start, next_start, n):
    """Turn a batch of uniforms into geometric gaps and emit the pairs hit.

    Walks the lexicographic pair index; ``row_start``/``next_start``
    track the current row's index range so each emit is O(1) amortized.
    """
    for i in range(us.size):
        gap = int(math.ceil(math.log1p(-us[i]) / log_q))
        if gap < 1:
            gap = 1
        k += gap
        if k >= total:
            return k, cnt, row, row_start, next_start
        while k >= next_start:
            row += 1
            row_start = next_start
            next_start += n - 1 - row
        u_out[cnt] = row
        v_out[cnt] = row + 1 + (k - row_start)
        cnt += 1
    return k, cnt, row, row_start, next_start


@njit(cache=True)
def _csr_from_sorted_pairs(n, u, v):
    """CSR arrays from unique edges (u < v) sorted lexicographically.

    Each row receives its smaller neighbors first (scatter of the
    reversed half) and its larger neighbors second; both passes emit in
    ascending order, so rows come out strictly sorted with no sort.
    """
    m = u.size
    deg = np.zeros(n, np.int64)
    for e in range(m):
        deg[u[e]] += 1
        deg[v[e]] += 1
    indptr = np.zeros(n + 1, np.int64)
    acc = 0
    for i in range(n):
        acc += deg[i]
        indptr[i + 1] = acc
    indices = np.empty(2 * m, np.int32)
    fill = indptr[:n].copy()
    for e in range(m):
        b = v[e]
        indices[fill[b]] = u[e]
        fill[b] += 1
    for e in range(m):
        a = u[e]
        indices[fill[a]] = v[e]
        fill[a] += 1
    return indptr, indices


def _sample_pairs(n: int, p: float, seed: int):
    """Present pairs of G(n, p) as sorted (u, v) int32 arrays, 0 < p < 1."""
    total = n * (n - 1) // 2
    rng = np.random.default_rng(_as_seed(seed))
    mean = total * p
    cap = int(mean + 6.0 * math.sqrt(mean * (1.0 - p)) + 64.0)
    u_out = np.empty(cap, np.int32)
    v_out = np.empty(cap, np.int32)
    log_q = math.log1p(-p)
    k = -1
    cnt = 0
    row = 0
    row_start = 0
    next_start = n - 1
    while k < total:
        size = max(_MIN_GAP_BATCH, int((total - k) * p * 1.1) + 16)
        if cnt + size > cap:  # 6-sigma headroom makes this branch vanishingly rare
            cap = cnt + size
            u_out = np.concatenate([u_out, np.empty(cap - u_out.size, np.int32)])
            v_out = np.concatenate([v_out, np.empty(cap - v_out.size, np.int32)])
        us = rng.random(size)
        k, cnt, row, row_start, next_start = _walk_gaps(
            us, log_q, total, k, cnt, u_out, v_out, row, row_start, next_start, n
        )
    return u_out[:cnt], v_out[:cnt]


def generate_gnp(n: int, p: float, seed: int) -> Graph:
    """Sample an Erdos-Renyi G(n, p) graph, deterministically in ``seed``.

    Each of the C(n, 2) vertex pairs is present independently with
    probability p. For 0 < p < 1 the runtime is O(n + m) expected;
    p = 0 and p = 1 short-circuit to the empty and complete graph.
    """
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    if n < 0:
        raise ParameterError(f"n must be nonnegative, got {n}")
    total = n * (n - 1) // 2
    if total == 0 or p == 0.0:
        return Graph(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int32))
    if p == 1.0:
        u = np.repeat(np.arange(n, dtype=np.int32), np.arange(n - 1, -1, -1))
        v = np.concatenate([np.arange(a + 1, n, dtype=np.int32) for a in range(n)])
        indptr, indices = _csr_from_sorted_pairs(n, u, v)
        return Graph(n, indptr, indices)
    u, v = _sample_pairs(n, p, seed)
    indptr, indices = _csr_from_sorted_pairs(n, u, v)
    return Graph(n, indptr, indices)


def from_edge_list(n: int, edges) -> Graph:
    """Build a graph from explicit undirected edges.

    Rejects endpoints outside [0, n), self-loops and duplicate edges
    (in either orientation).
    """
    if n < 0:
        raise ParameterError(f"n must be nonnegative, got {n}")
    seen = set()
    us = []
    vs = []
    for edge in edges:
        a, b = edge
        a, b = int(a), int(b)
        if not (0 <= a < n and 0 <= b < n):
            raise ValidationError(f"edge endpoint out of range: ({a}, {b})")
        if a == b:
            raise ValidationError(f"self-loop at vertex {a}")
        key = (a, b) if a < b else (b, a)
        if key in seen:
            raise ValidationError(f"duplicate edge ({a}, {b})")
        seen.add(key)
        us.append(key[0])
        vs.append(key[1])
    if not us:
        return Graph(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int32))
    u = np.asarray(us, dtype=np.int32)
    v = np.asarray(vs, dtype=np.int32)
    order = np.lexsort((v, u))
    indptr, indices = _csr_from_sorted_pairs(n, u[order], v[order])
    return Graph(n, indptr, indices)


def graph_stats(g: Graph) -> dict:
    """Exact degree aggregates: edge count, min/max/mean degree."""
    deg = g.degrees()
    if deg.size == 0:
        return {"edge_count": 0, "min_degree": 0, "max_degree": 0, "mean_degree": 0.0}
    return {
        "edge_count": g.edge_count,
        "min_degree": int(deg.min()),
        "max_degree": int(deg.max()),
        "mean_degree": float(deg.mean()),
    }


def dump_edge_list(g: Graph, path) -> None:
    """Write the plain-text edge list: first line ``n m``, then ``u v`` with u < v."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{g.n} {g.edge_count}\n")
        row = np.repeat(np.arange(g.n, dtype=np.int32), g.degrees())
        upper = row < g.indices
        for a, b in zip(row[upper], g.indices[upper]):
            fh.write(f"{a} {b}\n")


def load_edge_list(path) -> Graph:
    """Read the format written by :func:`dump_edge_list`."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValidationError("edge list header must be 'n m'")
        n, m = int(header[0]), int(header[1])
        edges = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            a, b = line.split()
            edges.append((int(a), int(b)))
    if len(edges) != m:
        raise ValidationError(f"edge list header promised {m} edges, found {len(edges)}")
    return from_edge_list(n, edges)

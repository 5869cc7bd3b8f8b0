"""Initial coloring schemes and the two-color state container.

A coloring assigns +1 (Red) or -1 (Blue) to every vertex. Three
sampling schemes are provided:

* ``fixed_advantage``: exactly ceil(n/2 + delta) Red vertices, the Red
  set uniform among subsets of that size;
* ``random_half``: every vertex independently Red or Blue with equal
  probability;
* ``balanced_with_defectors``: a balanced coloring plus a uniformly
  chosen set of delta Blue "defectors" flipped Red, returned together
  with the coupling data (the balanced coloring and the swing set).

All schemes are pure functions of (parameters, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ValidationError

__all__ = [
    "RED",
    "BLUE",
    "Coloring",
    "DefectorScenario",
    "fixed_advantage",
    "random_half",
    "balanced_with_defectors",
    "dump_coloring",
    "load_coloring",
]

RED = 1
BLUE = -1

_MASK64 = (1 << 64) - 1


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(int(seed) & _MASK64)


def _check_delta(delta) -> int:
    if isinstance(delta, float):
        if not delta.is_integer():
            raise ParameterError(f"delta must be an integer vertex count, got {delta}")
        delta = int(delta)
    elif isinstance(delta, (int, np.integer)):
        delta = int(delta)
    else:
        raise ParameterError(f"delta must be an integer vertex count, got {delta!r}")
    if delta < 0:
        raise ParameterError(f"delta must be nonnegative, got {delta}")
    return delta


@dataclass(frozen=True, eq=False)
class Coloring:
    """A +-1 label per vertex; +1 is Red, -1 is Blue."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.ascontiguousarray(self.labels, dtype=np.int8)
        if labels.ndim != 1:
            raise ValidationError("labels must be a 1-d array")
        if labels.size and not np.all(np.abs(labels) == 1):
            raise ValidationError("labels must all be +1 or -1")
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_red_count", int(np.count_nonzero(labels == RED)))

    @property
    def n(self) -> int:
        return self.labels.size

    @property
    def red_count(self) -> int:
        return self._red_count

    @property
    def blue_count(self) -> int:
        return self.n - self._red_count

    @property
    def advantage(self) -> float:
        """Half the signed label sum, (red_count - blue_count) / 2."""
        return (self.red_count - self.blue_count) / 2.0

    def is_unanimous(self) -> bool:
        return self.n > 0 and self.red_count in (0, self.n)

    def red_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.labels == RED)

    def blue_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.labels == BLUE)

    def negate(self) -> "Coloring":
        return Coloring(-self.labels)

    def flip(self, vertices) -> "Coloring":
        """New coloring with the given vertices' labels negated."""
        out = self.labels.copy()
        out[np.asarray(vertices, dtype=np.int64)] *= -1
        return Coloring(out)

    def same_as(self, other: "Coloring") -> bool:
        return np.array_equal(self.labels, other.labels)

    def to_letters(self) -> str:
        """One character per vertex, R for +1 and B for -1."""
        chars = np.where(self.labels == RED, np.uint8(ord("R")), np.uint8(ord("B")))
        return chars.tobytes().decode("ascii")

    @classmethod
    def from_letters(cls, text: str) -> "Coloring":
        raw = np.frombuffer(text.strip().encode("ascii"), dtype=np.uint8)
        if raw.size and not np.all((raw == ord("R")) | (raw == ord("B"))):
            raise ValidationError("coloring text must contain only R and B")
        return cls(np.where(raw == ord("R"), 1, -1).astype(np.int8))

    def __repr__(self) -> str:
        return f"Coloring(n={self.n}, red={self.red_count}, blue={self.blue_count})"


@dataclass(frozen=True, eq=False)
class DefectorScenario:
    """A balanced coloring, its swing set, and the resulting coloring.

    ``coloring`` equals ``hat_coloring`` with exactly the vertices in
    ``swing_set`` (a subset of the balanced coloring's Blue side)
    flipped to Red.
    """

    hat_coloring: Coloring
    swing_set: np.ndarray
    coloring: Coloring

    def __post_init__(self):
        swing = np.ascontiguousarray(np.sort(np.asarray(self.swing_set, dtype=np.int64)))
        swing.flags.writeable = False
        object.__setattr__(self, "swing_set", swing)
        n = self.hat_coloring.n
        if self.coloring.n != n:
            raise ValidationError("hat_coloring and coloring sizes differ")
        if swing.size and (swing[0] < 0 or swing[-1] >= n):
            raise ValidationError("swing set vertex out of range")
        if np.unique(swing).size != swing.size:
            raise ValidationError("swing set has duplicates")
        if np.any(self.hat_coloring.labels[swing] != BLUE):
            raise ValidationError("swing set must be Blue in the balanced coloring")
        if self.hat_coloring.red_count != (n + 1) // 2:
            raise ValidationError("hat coloring must have ceil(n/2) Red vertices")
        if not self.hat_coloring.flip(swing).same_as(self.coloring):
            raise ValidationError("coloring must equal hat_coloring with swing_set flipped")

    @property
    def delta(self) -> int:
        return int(self.swing_set.size)


def fixed_advantage(n: int, delta, seed) -> Coloring:
    """Uniformly random coloring with exactly ceil(n/2 + delta) Red vertices."""
    delta = _check_delta(delta)
    red_size = (n + 1) // 2 + delta
    if red_size > n:
        raise ParameterError(
            f"delta={delta} infeasible at n={n}: would need {red_size} Red vertices"
        )
    labels = np.full(n, BLUE, dtype=np.int8)
    labels[_rng(seed).permutation(n)[:red_size]] = RED
    return Coloring(labels)


def random_half(n: int, seed) -> Coloring:
    """Each vertex independently Red or Blue with probability 1/2."""
    if n < 0:
        raise ParameterError(f"n must be nonnegative, got {n}")
    bits = _rng(seed).integers(0, 2, size=n, dtype=np.int8)
    return Coloring(bits * 2 - 1)


def balanced_with_defectors(n: int, delta, seed) -> DefectorScenario:
    """Balanced coloring plus a uniform set of delta Blue defectors flipped Red.

    A single uniform permutation supplies both draws: its first
    ceil(n/2) entries are the balanced Red side, and the next delta
    entries are the swing set (uniform among delta-subsets of the Blue
    side, independent of which set it is).
    """
    delta = _check_delta(delta)
    if n < 0:
        raise ParameterError(f"n must be nonnegative, got {n}")
    red_size = (n + 1) // 2
    blue_size = n - red_size
    if delta > blue_size:
        raise ParameterError(
            f"delta={delta} exceeds the balanced Blue side ({blue_size} vertices)"
        )
    perm = _rng(seed).permutation(n)
    labels = np.full(n, BLUE, dtype=np.int8)
    labels[perm[:red_size]] = RED
    hat = Coloring(labels)
    swing = np.sort(perm[red_size:red_size + delta])
    return DefectorScenario(hat_coloring=hat, swing_set=swing, coloring=hat.flip(swing))


def dump_coloring(c: Coloring, path) -> None:
    """Write the one-line R/B text form."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(c.to_letters() + "\n")


def load_coloring(path) -> Coloring:
    """Read the format written by :func:`dump_coloring`."""
    with open(path, "r", encoding="ascii") as fh:
        return Coloring.from_letters(fh.readline())

"""Complementary-label transition matrices: builders, estimation, inversion, I/O.

A transition matrix is the C x C row-stochastic table Q with
Q[k, j] = p(complementary label = j | true label = k).  All noiseless
builders produce an exactly zero diagonal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import (
    InvalidClassCountError,
    InvalidSparsityError,
    SingularTransitionError,
    UndefinedRowError,
)

ROW_SUM_TOL = 1e-9
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic C x C probability table."""

    c: int
    rows: NDArray[np.float64] = field(repr=False)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        object.__setattr__(self, "rows", rows)
        rows.setflags(write=False)
        if rows.shape != (self.c, self.c):
            raise ValueError(f"expected shape ({self.c}, {self.c}), got {rows.shape}")
        if np.any(rows < -1e-15) or np.any(rows > 1 + 1e-12):
            raise ValueError("entries must lie in [0, 1]")
        if np.max(np.abs(rows.sum(axis=1) - 1.0)) > ROW_SUM_TOL:
            raise ValueError("rows must sum to 1")

    def to_json(self) -> str:
        return json.dumps({"c": self.c, "rows": [[float(v) for v in r] for r in self.rows]})

    @classmethod
    def from_json(cls, text: str) -> "TransitionMatrix":
        doc = json.loads(text)
        return cls(c=int(doc["c"]), rows=np.array(doc["rows"], dtype=np.float64))


@dataclass(frozen=True)
class PairCounts:
    """C x C table of observed (true label, complementary label) pair counts."""

    c: int
    counts: NDArray[np.int64] = field(repr=False)

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", counts)
        if counts.shape != (self.c, self.c):
            raise ValueError(f"expected shape ({self.c}, {self.c}), got {counts.shape}")
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")


def make_uniform(c: int) -> TransitionMatrix:
    """Zero diagonal, every off-diagonal entry 1/(C-1)."""
    if c < 2:
        raise InvalidClassCountError(f"need C >= 2, got {c}")
    rows = np.full((c, c), 1.0 / (c - 1))
    np.fill_diagonal(rows, 0.0)
    return TransitionMatrix(c=c, rows=rows)


def _three_level_group_sizes(n_offdiag: int) -> tuple[int, int, int]:
    # remainder classes join groups in order (high, mid)
    base, rem = divmod(n_offdiag, 3)
    sizes = [base, base, base]
    for i in range(rem):
        sizes[i] += 1
    return tuple(sizes)


def make_biased_three_level(c: int, seed: int) -> TransitionMatrix:
    """Partition each row's off-diagonal classes into three groups carrying
    total masses 0.75, 0.24, and 0.01, split evenly within each group."""
    if c < 4:
        raise InvalidClassCountError(f"need C >= 4 for three nonempty groups, got {c}")
    rng = np.random.default_rng(seed)
    level_masses = (0.75, 0.24, 0.01)
    rows = np.zeros((c, c))
    for y in range(c):
        offdiag = [(y + 1 + i) % c for i in range(c - 1)]
        order = rng.permutation(c - 1)
        shuffled = [offdiag[i] for i in order]
        sizes = _three_level_group_sizes(c - 1)
        pos = 0
        for mass, g in zip(level_masses, sizes):
            for col in shuffled[pos:pos + g]:
                rows[y, col] = mass / g
            pos += g
    return TransitionMatrix(c=c, rows=rows)


def sparsify_with_keep_sets(q: TransitionMatrix, keep_sets: list[list[int]]) -> TransitionMatrix:
    """Zero out all but the listed columns of each row and renormalize.

    Rows whose kept entries are all zero fall back to uniform over the kept set.
    """
    c = q.c
    rows = np.zeros((c, c))
    for y, keep in enumerate(keep_sets):
        keep = list(keep)
        kept = q.rows[y, keep]
        total = kept.sum()
        if total > 0:
            rows[y, keep] = kept / total
        else:
            rows[y, keep] = 1.0 / len(keep)
    return TransitionMatrix(c=c, rows=rows)


def make_sparse_from_dense(q: TransitionMatrix, k: int, seed: int) -> TransitionMatrix:
    """Keep k randomly chosen off-diagonal entries per row and renormalize."""
    c = q.c
    if not 1 <= k <= c - 1:
        raise InvalidSparsityError(f"k must be in [1, {c - 1}], got {k}")
    rng = np.random.default_rng(seed)
    # random keys give a uniform k-subset of the off-diagonal per row
    keys = rng.random((c, c))
    np.fill_diagonal(keys, np.inf)
    kept_idx = np.argpartition(keys, k - 1, axis=1)[:, :k]
    keep_sets = [sorted(int(j) for j in kept_idx[y]) for y in range(c)]
    return sparsify_with_keep_sets(q, keep_sets)


def make_bicl_analysis(c: int, k: int, seed: int) -> TransitionMatrix:
    """Idealized analysis-case matrix: k uniform off-diagonal entries per row."""
    if not 1 <= k <= c - 1:
        raise InvalidSparsityError(f"k must be in [1, {c - 1}], got {k}")
    rng = np.random.default_rng(seed)
    rows = np.zeros((c, c))
    for y in range(c):
        offdiag = np.array([j for j in range(c) if j != y])
        chosen = rng.choice(offdiag, size=k, replace=False)
        rows[y, chosen] = 1.0 / k
    return TransitionMatrix(c=c, rows=rows)


def estimate_from_pairs(counts: PairCounts, smoothing: float = 0.0) -> TransitionMatrix:
    """Row-normalize pair counts with additive (Laplace) smoothing.

    The diagonal is not forced to zero: observed self-pairs are annotation
    noise and are preserved.
    """
    if smoothing < 0:
        raise ValueError("smoothing must be >= 0")
    smoothed = counts.counts.astype(np.float64) + smoothing
    totals = smoothed.sum(axis=1)
    if np.any(totals <= 0):
        bad = int(np.argmin(totals))
        raise UndefinedRowError(f"row {bad} has zero total and zero smoothing")
    return TransitionMatrix(c=counts.c, rows=smoothed / totals[:, None])


def invert(q: TransitionMatrix) -> NDArray[np.float64]:
    """Inverse of Q, rejecting singular or ill-conditioned matrices."""
    cond = np.linalg.cond(q.rows)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularTransitionError(
            f"condition estimate {cond:.3g} exceeds {CONDITION_LIMIT:.0e}; "
            "the unbiased risk estimator is unavailable for this matrix"
        )
    q_inv = np.linalg.inv(q.rows)
    residual = np.max(np.abs(q.rows @ q_inv - np.eye(q.c)))
    if residual >= 1e-8:
        raise SingularTransitionError(f"round-trip residual {residual:.3g} too large")
    return q_inv


def save(q: TransitionMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(q.to_json())
        fh.write("\n")


def load(path) -> TransitionMatrix:
    with open(path) as fh:
        return TransitionMatrix.from_json(fh.read())

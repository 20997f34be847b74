"""Conditional entropy, mutual information, and the Fano-style error floor.

All quantities in this module are in bits (base-2 logarithms).  Training
losses elsewhere use natural log.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidArgumentError, ShapeError
from .transition import TransitionMatrix, make_sparse_from_dense

ORDERING_SLACK = 1e-12


@dataclass(frozen=True)
class ClassPrior:
    """Distribution over the C true classes."""

    c: int
    p: NDArray[np.float64] = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        object.__setattr__(self, "p", p)
        if p.shape != (self.c,):
            raise ValueError(f"expected shape ({self.c},), got {p.shape}")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("prior must be non-negative and sum to 1")

    @classmethod
    def uniform(cls, c: int) -> "ClassPrior":
        return cls(c=c, p=np.full(c, 1.0 / c))

    @classmethod
    def from_labels(cls, labels, c: int) -> "ClassPrior":
        counts = np.bincount(np.asarray(labels), minlength=c).astype(np.float64)
        return cls(c=c, p=counts / counts.sum())


@dataclass(frozen=True)
class InfoReport:
    cond_entropy_bits: float
    mutual_info_bits: float
    fano_bound: float
    c: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "h_cond_bits": self.cond_entropy_bits,
                "i_yybar_bits": self.mutual_info_bits,
                "fano_bound": self.fano_bound,
                "c": self.c,
            }
        )


def _entropy_bits(p: NDArray[np.float64]) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def conditional_entropy(q: TransitionMatrix, prior: ClassPrior) -> float:
    """H(Y | Ybar) in bits under the given prior.

    Columns with zero marginal probability contribute nothing (0 log 0 := 0).
    """
    if q.c != prior.c:
        raise ShapeError(f"matrix C={q.c} vs prior C={prior.c}")
    joint = prior.p[:, None] * q.rows          # joint[k, j] = p(Y=k, Ybar=j)
    p_bar = joint.sum(axis=0)
    h = 0.0
    for j in range(q.c):
        if p_bar[j] > 0:
            h += p_bar[j] * _entropy_bits(joint[:, j] / p_bar[j])
    return h


def mutual_information(q: TransitionMatrix, prior: ClassPrior) -> float:
    """I(Y; Ybar) = H(Y) - H(Y | Ybar), in bits."""
    return _entropy_bits(prior.p) - conditional_entropy(q, prior)


def fano_lower_bound(h_cond_bits: float, i_yx_bits: float, c: int) -> float:
    """Error-probability floor (H(Y|Ybar) - I(Y;X) - 1) / log2(C-1).

    Returned unclamped; a negative value means the bound is vacuous.
    """
    if c <= 2:
        raise InvalidArgumentError(f"need C >= 3 for a positive denominator, got {c}")
    if h_cond_bits < 0 or i_yx_bits < 0:
        raise InvalidArgumentError("entropy and mutual information must be >= 0")
    return (h_cond_bits - i_yx_bits - 1.0) / np.log2(c - 1)


def info_report(q: TransitionMatrix, prior: ClassPrior, i_yx_bits: float = 0.0) -> InfoReport:
    h = conditional_entropy(q, prior)
    i = mutual_information(q, prior)
    fano = fano_lower_bound(h, i_yx_bits, q.c) if q.c >= 3 else float("nan")
    return InfoReport(cond_entropy_bits=h, mutual_info_bits=i, fano_bound=fano, c=q.c)


def random_dense_q(c: int, rng: np.random.Generator) -> TransitionMatrix:
    """Off-diagonal entries U[0,1], zero diagonal, rows normalized."""
    rows = rng.random((c, c))
    np.fill_diagonal(rows, 0.0)
    rows /= rows.sum(axis=1, keepdims=True)
    return TransitionMatrix(c=c, rows=rows)


def entropy_ordering_trials(c: int, k: int, trials: int, seed: int):
    """Per-trial (dense, sparse) conditional entropies for the ordering study.

    Each trial draws a random dense matrix, sparsifies it to k kept entries
    per row, and evaluates both entropies under a uniform prior.  Trial RNG
    streams are spawned from the seed so results do not depend on execution
    order or worker count.
    """
    if trials < 1:
        raise InvalidArgumentError(f"need at least one trial, got {trials}")
    prior = ClassPrior.uniform(c)
    children = np.random.SeedSequence(seed).spawn(trials)
    pairs = np.empty((trials, 2))
    for t, child in enumerate(children):
        gen_seq, sparse_seq = child.spawn(2)
        rng = np.random.default_rng(gen_seq)
        dense = random_dense_q(c, rng)
        sparse = make_sparse_from_dense(dense, k, seed=sparse_seq)
        pairs[t, 0] = conditional_entropy(dense, prior)
        pairs[t, 1] = conditional_entropy(sparse, prior)
    return pairs


def entropy_ordering_simulation(c: int, k: int, trials: int, seed: int) -> float:
    """Fraction of random trials where sparsifying does not raise H(Y|Ybar)."""
    pairs = entropy_ordering_trials(c, k, trials, seed)
    ok = pairs[:, 1] <= pairs[:, 0] + ORDERING_SLACK
    return float(ok.mean())

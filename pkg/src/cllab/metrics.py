"""Dataset-quality diagnostics for collected complementary labels."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError
from .infotheory import ClassPrior, conditional_entropy, mutual_information
from .protocol import ComplementaryDataset
from .transition import PairCounts, TransitionMatrix, estimate_from_pairs


@dataclass(frozen=True)
class DatasetReport:
    noise_rate: float
    imbalance_ratio: float
    zero_count_classes: list[int]
    counts: list[int]
    empirical_q: TransitionMatrix = field(repr=False)
    h_cond_bits_uniform: float = 0.0
    h_cond_bits_empirical: float = 0.0
    i_bits_uniform: float = 0.0
    i_bits_empirical: float = 0.0

    def to_json(self) -> str:
        return json.dumps({
            "noise_rate": self.noise_rate,
            "imbalance_ratio": self.imbalance_ratio,
            "zero_count_classes": self.zero_count_classes,
            "h_cond_bits_uniform": self.h_cond_bits_uniform,
            "h_cond_bits_empirical": self.h_cond_bits_empirical,
            "i_bits_uniform": self.i_bits_uniform,
            "i_bits_empirical": self.i_bits_empirical,
            "counts": self.counts,
        })


def noise_rate(ds: ComplementaryDataset) -> float:
    """Fraction of samples whose complementary label equals the true label."""
    if ds.base.n == 0:
        raise InvalidArgumentError("empty dataset")
    return float((ds.cl == ds.base.labels).mean())


def cl_counts(ds: ComplementaryDataset) -> np.ndarray:
    return np.bincount(ds.cl, minlength=ds.base.c)


def imbalance_ratio(ds: ComplementaryDataset):
    """Max over min nonzero complementary-label count; zero-count classes
    are excluded from the denominator and reported separately."""
    counts = cl_counts(ds)
    if counts.sum() == 0:
        raise InvalidArgumentError("empty dataset")
    nonzero = counts[counts > 0]
    ratio = float(counts.max() / nonzero.min())
    zero_classes = [int(k) for k in np.flatnonzero(counts == 0)]
    return ratio, zero_classes


def pair_counts(ds: ComplementaryDataset) -> PairCounts:
    c = ds.base.c
    table = np.zeros((c, c), dtype=np.int64)
    np.add.at(table, (ds.base.labels, ds.cl), 1)
    return PairCounts(c=c, counts=table)


def empirical_transition(ds: ComplementaryDataset, smoothing: float = 0.0) -> TransitionMatrix:
    """Empirical transition estimated from observed (y, ybar) pairs."""
    return estimate_from_pairs(pair_counts(ds), smoothing)


def dataset_report(ds: ComplementaryDataset, smoothing: float = 0.0) -> DatasetReport:
    c = ds.base.c
    q = empirical_transition(ds, smoothing)
    uni = ClassPrior.uniform(c)
    emp = ClassPrior.from_labels(ds.base.labels, c)
    ratio, zero_classes = imbalance_ratio(ds)
    return DatasetReport(
        noise_rate=noise_rate(ds),
        imbalance_ratio=ratio,
        zero_count_classes=zero_classes,
        counts=[int(x) for x in cl_counts(ds)],
        empirical_q=q,
        h_cond_bits_uniform=conditional_entropy(q, uni),
        h_cond_bits_empirical=conditional_entropy(q, emp),
        i_bits_uniform=mutual_information(q, uni),
        i_bits_empirical=mutual_information(q, emp),
    )

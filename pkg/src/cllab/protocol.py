"""Synthetic data generation, clustering, candidate sets, and annotation.

This module is the executable form of the constrained-labeling pipelines:
group samples (by true class or by cluster), fix a small candidate label
set per group, and draw one complementary label per sample from it.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidArgumentError, InvalidSparsityError, ShapeError
from .transition import TransitionMatrix

MIN_MEAN_GAP = 4.0


@dataclass(frozen=True)
class LabeledDataset:
    n: int
    d: int
    c: int
    features: NDArray[np.float64] = field(repr=False)
    labels: NDArray[np.int64] = field(repr=False)

    def __post_init__(self):
        if self.features.shape != (self.n, self.d):
            raise ValueError("feature shape mismatch")
        if self.labels.shape != (self.n,):
            raise ValueError("label shape mismatch")
        if np.any(self.labels < 0) or np.any(self.labels >= self.c):
            raise ValueError("label index out of range")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features must be finite")


@dataclass(frozen=True)
class ComplementaryDataset:
    """Complementary labels plus the hidden true labels for oracle metrics."""

    base: LabeledDataset
    cl: NDArray[np.int64] = field(repr=False)

    def __post_init__(self):
        if self.cl.shape != (self.base.n,):
            raise ValueError("complementary label shape mismatch")
        if np.any(self.cl < 0) or np.any(self.cl >= self.base.c):
            raise ValueError("complementary label index out of range")


@dataclass(frozen=True)
class CandidateAssignment:
    """Fixed candidate label set per group (class or cluster)."""

    mode: str                      # "per-class" | "per-cluster"
    groups: dict[int, list[int]]   # group id -> ordered candidate set
    k: int


@dataclass(frozen=True)
class ClusterModel:
    k: int
    centroids: NDArray[np.float64] = field(repr=False)
    assignments: NDArray[np.int64] = field(repr=False)


def gen_blobs(c: int, n_per_class: int, d: int, spread: float, seed: int) -> LabeledDataset:
    """Isotropic Gaussian blobs with class means at pairwise distance >= 4."""
    if c < 2 or n_per_class < 1 or d < 1 or spread <= 0:
        raise InvalidArgumentError("need C >= 2, n_per_class >= 1, d >= 1, spread > 0")
    rng = np.random.default_rng(seed)
    means = rng.normal(size=(c, d))
    diffs = means[:, None, :] - means[None, :, :]
    dists = np.sqrt((diffs ** 2).sum(axis=2))
    np.fill_diagonal(dists, np.inf)
    gap = dists.min()
    if gap < MIN_MEAN_GAP:
        means *= MIN_MEAN_GAP / gap
    features = np.empty((c * n_per_class, d))
    labels = np.repeat(np.arange(c), n_per_class)
    for k in range(c):
        block = slice(k * n_per_class, (k + 1) * n_per_class)
        features[block] = means[k] + spread * rng.normal(size=(n_per_class, d))
    return LabeledDataset(n=c * n_per_class, d=d, c=c, features=features, labels=labels.astype(np.int64))


def _assign_nearest(features, centroids):
    # ties break to the lowest centroid index (argmin convention)
    d2 = ((features[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1), d2


def _kmeanspp_init(features, k, rng):
    n = features.shape[0]
    centroids = np.empty((k, features.shape[1]))
    centroids[0] = features[rng.integers(n)]
    closest = ((features - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        probs = closest / closest.sum() if closest.sum() > 0 else np.full(n, 1.0 / n)
        centroids[j] = features[rng.choice(n, p=probs)]
        closest = np.minimum(closest, ((features - centroids[j]) ** 2).sum(axis=1))
    return centroids


def kmeans(features: NDArray[np.float64], k: int, max_iters: int, seed: int) -> ClusterModel:
    """Seeded k-means++ initialization followed by Lloyd iterations."""
    n = features.shape[0]
    if k > n or k < 1:
        raise InvalidArgumentError(f"need 1 <= K <= n, got K={k}, n={n}")
    if max_iters < 1:
        raise InvalidArgumentError("max_iters must be >= 1")
    rng = np.random.default_rng(seed)
    centroids = _kmeanspp_init(features, k, rng)
    assignments = np.full(n, -1)
    for _ in range(max_iters):
        new_assign, d2 = _assign_nearest(features, centroids)
        # an emptied cluster re-seizes the point farthest from its nearest centroid
        for j in range(k):
            if not np.any(new_assign == j):
                nearest = d2[np.arange(n), new_assign]
                far = int(nearest.argmax())
                new_assign[far] = j
                d2[far, :] = np.inf
                d2[far, j] = 0.0
        if np.array_equal(new_assign, assignments):
            break
        assignments = new_assign
        for j in range(k):
            centroids[j] = features[assignments == j].mean(axis=0)
    assignments, _ = _assign_nearest(features, centroids)
    return ClusterModel(k=k, centroids=centroids, assignments=assignments.astype(np.int64))


def assign_candidates(mode: str, group_ids, c: int, k: int, seed: int) -> CandidateAssignment:
    """One fixed candidate set of k distinct labels per group id.

    Per-class mode excludes the group's own class; per-cluster mode samples
    from the full label space.  The drawn set is shuffled once, which leaves
    the statistics unchanged for an order-invariant annotator.
    """
    if mode not in ("per-class", "per-cluster"):
        raise InvalidArgumentError(f"unknown mode {mode!r}")
    limit = c - 1 if mode == "per-class" else c
    if not 1 <= k <= limit:
        raise InvalidSparsityError(f"k must be in [1, {limit}] for {mode}, got {k}")
    rng = np.random.default_rng(seed)
    groups = {}
    for gid in sorted(set(int(g) for g in np.asarray(group_ids))):
        if mode == "per-class":
            pool = np.array([j for j in range(c) if j != gid])
        else:
            pool = np.arange(c)
        chosen = rng.choice(pool, size=k, replace=False)
        groups[gid] = [int(x) for x in rng.permutation(chosen)]
    return CandidateAssignment(mode=mode, groups=groups, k=k)


def annotate_rule_based(
    ds: LabeledDataset,
    ca: CandidateAssignment,
    group_ids,
    error_rate: float,
    seed: int,
) -> ComplementaryDataset:
    """Pick one complementary label per sample from its group's candidate set.

    With probability 1 - error_rate the true label is discarded first (if
    present) and the pick is uniform over the rest; with probability
    error_rate the pick is uniform over the full candidate set.  If discarding
    empties the set, fall back to uniform over all non-true classes.
    """
    if not 0.0 <= error_rate <= 1.0:
        raise InvalidArgumentError("error_rate must be in [0, 1]")
    group_ids = np.asarray(group_ids)
    if group_ids.shape != (ds.n,):
        raise ShapeError("group ids must align with the dataset")
    rng = np.random.default_rng(seed)
    cl = np.empty(ds.n, dtype=np.int64)
    for i in range(ds.n):
        cands = ca.groups[int(group_ids[i])]
        y = int(ds.labels[i])
        if error_rate > 0 and rng.random() < error_rate:
            pool = cands
        else:
            pool = [lab for lab in cands if lab != y]
            if not pool:
                pool = [lab for lab in range(ds.c) if lab != y]
        cl[i] = pool[rng.integers(len(pool))]
    return ComplementaryDataset(base=ds, cl=cl)


def sample_from_q(ds: LabeledDataset, q: TransitionMatrix, seed: int) -> ComplementaryDataset:
    """Draw each complementary label from the transition row of its true class."""
    if ds.c != q.c:
        raise ShapeError(f"dataset C={ds.c} vs matrix C={q.c}")
    rng = np.random.default_rng(seed)
    cl = np.empty(ds.n, dtype=np.int64)
    for k in range(ds.c):
        idx = np.flatnonzero(ds.labels == k)
        if idx.size:
            cl[idx] = rng.choice(ds.c, size=idx.size, p=q.rows[k])
    return ComplementaryDataset(base=ds, cl=cl)


def gen_blobs_split(c: int, n_train_per_class: int, n_test_per_class: int,
                    d: int, spread: float, seed: int):
    """One blob draw split per class into train/test, so both share the means."""
    combined = gen_blobs(c, n_train_per_class + n_test_per_class, d, spread, seed)
    tr_idx, te_idx = [], []
    for k in range(c):
        members = np.flatnonzero(combined.labels == k)
        tr_idx.extend(members[:n_train_per_class])
        te_idx.extend(members[n_train_per_class:])

    def subset(idx):
        idx = np.array(idx)
        return LabeledDataset(n=idx.size, d=d, c=c,
                              features=combined.features[idx],
                              labels=combined.labels[idx])

    return subset(tr_idx), subset(te_idx)


# ---------------------------------------------------------------- CSV I/O

def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def dataset_to_csv(ds: LabeledDataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"f{j}" for j in range(ds.d)] + ["y"])
    for i in range(ds.n):
        w.writerow([_fmt(v) for v in ds.features[i]] + [int(ds.labels[i])])
    return buf.getvalue()


def complementary_to_csv(cds: ComplementaryDataset) -> str:
    ds = cds.base
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"f{j}" for j in range(ds.d)] + ["y", "ybar"])
    for i in range(ds.n):
        w.writerow([_fmt(v) for v in ds.features[i]] + [int(ds.labels[i]), int(cds.cl[i])])
    return buf.getvalue()


def _parse_rows(text: str):
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    return header, body


def dataset_from_csv(text: str, c: int | None = None) -> LabeledDataset:
    header, body = _parse_rows(text)
    if "y" not in header:
        raise InvalidArgumentError("missing 'y' column")
    d = header.index("y")
    features = np.array([[float(v) for v in row[:d]] for row in body])
    labels = np.array([int(row[d]) for row in body], dtype=np.int64)
    c = c if c is not None else int(labels.max()) + 1
    return LabeledDataset(n=len(body), d=d, c=c, features=features, labels=labels)


def complementary_from_csv(text: str, c: int | None = None) -> ComplementaryDataset:
    header, body = _parse_rows(text)
    if header[-1] != "ybar" or "y" not in header:
        raise InvalidArgumentError("missing 'y'/'ybar' columns")
    d = header.index("y")
    features = np.array([[float(v) for v in row[:d]] for row in body])
    labels = np.array([int(row[d]) for row in body], dtype=np.int64)
    cl = np.array([int(row[d + 1]) for row in body], dtype=np.int64)
    c = c if c is not None else int(max(labels.max(), cl.max())) + 1
    base = LabeledDataset(n=len(body), d=d, c=c, features=features, labels=labels)
    return ComplementaryDataset(base=base, cl=cl)

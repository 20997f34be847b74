"""Canned 10-class matrices used in tests and CLI demos.

The dense matrix concentrates 0.90 of each row's mass on one semantically
similar class; the sparse matrix keeps four columns per row and renormalizes.
The pair demonstrates that sparsifying does not always reduce conditional
entropy: the dense matrix here is far less ambiguous than its sparsified
counterpart.
"""

import numpy as np

from .transition import TransitionMatrix, sparsify_with_keep_sets

_DENSE_ROWS = [
    [0.00, 0.02, 0.02, 0.02, 0.02, 0.90, 0.005, 0.005, 0.005, 0.005],
    [0.02, 0.00, 0.02, 0.02, 0.02, 0.005, 0.90, 0.005, 0.005, 0.005],
    [0.02, 0.02, 0.00, 0.02, 0.02, 0.005, 0.005, 0.90, 0.005, 0.005],
    [0.02, 0.02, 0.02, 0.00, 0.02, 0.005, 0.005, 0.005, 0.90, 0.005],
    [0.02, 0.02, 0.02, 0.02, 0.00, 0.005, 0.005, 0.005, 0.005, 0.90],
    [0.02, 0.02, 0.02, 0.02, 0.90, 0.00, 0.005, 0.005, 0.005, 0.005],
    [0.02, 0.02, 0.02, 0.02, 0.005, 0.90, 0.00, 0.005, 0.005, 0.005],
    [0.02, 0.02, 0.02, 0.02, 0.005, 0.005, 0.90, 0.00, 0.005, 0.005],
    [0.02, 0.02, 0.02, 0.02, 0.005, 0.005, 0.005, 0.90, 0.00, 0.005],
    [0.02, 0.02, 0.02, 0.02, 0.005, 0.005, 0.005, 0.005, 0.90, 0.00],
]

# keep-sets applied to the dense matrix to produce the sparse counterpart
KEEP_SETS_10 = [[j for j in range(5) if j != y] if y < 5 else [0, 1, 2, 3] for y in range(10)]


def demo_dense_biased_10() -> TransitionMatrix:
    """Dense 10-class matrix with one dominant column per row."""
    return TransitionMatrix(c=10, rows=np.array(_DENSE_ROWS))


def demo_sparse_biased_10() -> TransitionMatrix:
    """Four-column sparsification of the dense demo matrix (rank deficient)."""
    return sparsify_with_keep_sets(demo_dense_biased_10(), KEEP_SETS_10)

"""Corrected losses for learning from complementary labels.

All losses here are in nats and return analytic gradients with respect to
the logits (and, for the trainable-transition variant, the transition
parameters).  Batch aggregation and the negative-risk corrections live in
the training loop.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .transition import TransitionMatrix

PROB_CLAMP = 1e-12


def softmax(logits: NDArray[np.float64]) -> NDArray[np.float64]:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(logits: NDArray[np.float64], label: int):
    """Ordinary softmax cross-entropy with its gradient."""
    p = softmax(logits)
    loss = -np.log(max(PROB_CLAMP, p[label]))
    grad = p.copy()
    grad[label] -= 1.0
    return loss, grad


def per_class_losses(logits: NDArray[np.float64]) -> NDArray[np.float64]:
    """Vector of cross-entropy losses against every possible class."""
    p = softmax(logits)
    return -np.log(np.maximum(PROB_CLAMP, p))


def loss_fwd(q: TransitionMatrix, logits: NDArray[np.float64], ybar: int):
    """Forward correction: cross-entropy of Q^T softmax(logits) at ybar."""
    p = softmax(logits)
    col = q.rows[:, ybar]
    pbar = float(p @ col)
    if pbar <= PROB_CLAMP:
        return -np.log(PROB_CLAMP), np.zeros_like(logits)
    loss = -np.log(pbar)
    # d pbar / d z = p * col - p * (p . col)
    grad = -(p * col - p * pbar) / pbar
    return loss, grad


def loss_ure(q_inv: NDArray[np.float64], logits: NDArray[np.float64], ybar: int):
    """Per-class components of the inverse-corrected risk.

    Returns the vector v with v[k] = Qinv[ybar, k] * CE(logits, k); the
    sample's risk is v.sum().  Components can be negative, which is the
    pathology the clipping and gradient-ascent corrections address.
    """
    return q_inv[ybar] * per_class_losses(logits)


def ure_grad(q_inv, logits, ybar, class_mask=None):
    """Gradient of the (optionally masked) summed URE components."""
    p = softmax(logits)
    w = q_inv[ybar].copy()
    if class_mask is not None:
        w = w * class_mask
    # d CE(z, k) / dz = p - e_k
    return w.sum() * p - w


def _cpe_t_matrix(theta: NDArray[np.float64]) -> NDArray[np.float64]:
    """Row-wise softmax over C-1 off-diagonal free parameters per row."""
    c = theta.shape[0]
    t = np.zeros((c, c))
    for r in range(c):
        cols = [j for j in range(c) if j != r]
        t[r, cols] = softmax(theta[r])
    return t


def loss_cpe(variant: str, q_or_theta, logits: NDArray[np.float64], ybar: int):
    """Complementary probability estimation loss.

    variant "i": plain cross-entropy against the complementary label.
    variant "f": cross-entropy of Q^T softmax(logits) at ybar (same as FWD).
    variant "t": as "f" with a trainable transition built from free
    parameters; returns (loss, grad_logits, grad_theta).
    """
    if variant == "i":
        loss, grad = cross_entropy(logits, ybar)
        return loss, grad
    if variant == "f":
        return loss_fwd(q_or_theta, logits, ybar)
    if variant == "t":
        theta = q_or_theta
        c = logits.shape[0]
        t = _cpe_t_matrix(theta)
        p = softmax(logits)
        col = t[:, ybar]
        pbar = float(p @ col)
        if pbar <= PROB_CLAMP:
            return -np.log(PROB_CLAMP), np.zeros_like(logits), np.zeros_like(theta)
        loss = -np.log(pbar)
        grad_logits = -(p * col - p * pbar) / pbar
        # d pbar / d t[r, ybar] = p[r]; chain through each row's softmax
        grad_theta = np.zeros_like(theta)
        for r in range(c):
            if r == ybar:
                continue
            cols = [j for j in range(c) if j != r]
            s = t[r, cols]
            pos = cols.index(ybar)
            dcol = -p[r] / pbar           # d loss / d t[r, ybar]
            grad_theta[r] = dcol * (np.where(np.arange(c - 1) == pos, s[pos], 0.0) - s[pos] * s)
        return loss, grad_logits, grad_theta
    raise ValueError(f"unknown CPE variant {variant!r}")


def cpe_t_init(c: int) -> NDArray[np.float64]:
    """Free parameters giving a uniform zero-diagonal transition."""
    return np.zeros((c, c - 1))


def cpe_t_matrix(theta: NDArray[np.float64]) -> NDArray[np.float64]:
    return _cpe_t_matrix(theta)


def loss_combined_value(alpha: float, ce_mean: float, fwd_mean: float, c: int) -> float:
    """alpha * mean seed-set CE + (1 - alpha) * (C - 1) * mean forward loss."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    return alpha * ce_mean + (1.0 - alpha) * (c - 1) * fwd_mean

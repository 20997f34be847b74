"""Softmax classifiers trained from complementary labels.

Small linear or one-hidden-layer networks with hand-written backprop, so
every corrected loss can be finite-difference checked end to end.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from . import losses
from .errors import InvalidArgumentError
from .protocol import ComplementaryDataset, LabeledDataset
from .transition import TransitionMatrix, invert


@dataclass
class ClassifierParams:
    """Weights of a linear or one-hidden-layer (ReLU) softmax classifier."""

    arch: str            # "linear" | "mlp"
    d: int
    c: int
    hidden: int = 64
    w1: NDArray[np.float64] = None
    b1: NDArray[np.float64] = None
    w2: NDArray[np.float64] = None
    b2: NDArray[np.float64] = None

    @classmethod
    def init(cls, arch: str, d: int, c: int, hidden: int, rng: np.random.Generator):
        if arch == "linear":
            return cls(arch=arch, d=d, c=c, hidden=0,
                       w1=rng.normal(0, 0.01, (d, c)), b1=np.zeros(c))
        if arch == "mlp":
            return cls(arch=arch, d=d, c=c, hidden=hidden,
                       w1=rng.normal(0, np.sqrt(2.0 / d), (d, hidden)), b1=np.zeros(hidden),
                       w2=rng.normal(0, np.sqrt(2.0 / hidden), (hidden, c)), b2=np.zeros(c))
        raise InvalidArgumentError(f"unknown arch {arch!r}")

    def logits(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        if self.arch == "linear":
            return x @ self.w1 + self.b1
        h = np.maximum(0.0, x @ self.w1 + self.b1)
        return h @ self.w2 + self.b2

    def _forward_cache(self, x):
        if self.arch == "linear":
            return x @ self.w1 + self.b1, None
        pre = x @ self.w1 + self.b1
        h = np.maximum(0.0, pre)
        return h @ self.w2 + self.b2, (pre, h)

    def _backward(self, x, cache, grad_z):
        if self.arch == "linear":
            return {"w1": x.T @ grad_z, "b1": grad_z.sum(axis=0)}
        pre, h = cache
        grad_h = (grad_z @ self.w2.T) * (pre > 0)
        return {
            "w1": x.T @ grad_h, "b1": grad_h.sum(axis=0),
            "w2": h.T @ grad_z, "b2": grad_z.sum(axis=0),
        }

    def param_items(self):
        names = ["w1", "b1"] if self.arch == "linear" else ["w1", "b1", "w2", "b2"]
        return [(n, getattr(self, n)) for n in names]


@dataclass
class LossSpec:
    kind: str                       # "ce" | "fwd" | "ure" | "cpe" | "combined"
    q: TransitionMatrix | None = None
    ure_correction: str = "none"    # "none" | "nn" | "ga"
    cpe_variant: str = "f"          # "i" | "f" | "t"
    alpha: float = 0.5
    seed_set: LabeledDataset | None = None

    def __post_init__(self):
        if self.kind in ("fwd", "combined") and self.q is None:
            raise InvalidArgumentError(f"{self.kind} requires a transition matrix")
        if self.kind == "ure" and self.q is None:
            raise InvalidArgumentError("ure requires a transition matrix")
        if self.kind == "cpe" and self.cpe_variant in ("f", "t") and self.q is None:
            raise InvalidArgumentError("cpe-f/t require a transition matrix")
        if self.kind == "combined" and self.seed_set is None:
            raise InvalidArgumentError("combined requires a seed set")
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidArgumentError("alpha must be in [0, 1]")


@dataclass
class TrainConfig:
    epochs: int = 100
    batch_size: int = 128
    learning_rate: float = 1e-3
    weight_decay: float = 1e-5
    optimizer: str = "adam"
    arch: str = "mlp"
    hidden: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1 or self.learning_rate <= 0:
            raise InvalidArgumentError("epochs, batch_size, learning_rate must be positive")


@dataclass
class TrainReport:
    train_loss: list[float]
    test_acc: list[float]
    params: ClassifierParams
    final_accuracy: float
    per_class_accuracy: list[float]

    def curves_csv(self) -> str:
        lines = ["epoch,loss,test_acc"]
        for e, (l, a) in enumerate(zip(self.train_loss, self.test_acc), start=1):
            lines.append(f"{e},{l:.12g},{a:.12g}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({
            "train_loss": self.train_loss,
            "test_acc": self.test_acc,
            "final_accuracy": self.final_accuracy,
            "per_class_accuracy": self.per_class_accuracy,
        })


class _Adam:
    def __init__(self, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m, self.v, self.t = {}, {}, 0

    def step(self, params_and_grads):
        self.t += 1
        for name, p, g in params_and_grads:
            if name not in self.m:
                self.m[name] = np.zeros_like(p)
                self.v[name] = np.zeros_like(p)
            self.m[name] = self.b1 * self.m[name] + (1 - self.b1) * g
            self.v[name] = self.b2 * self.v[name] + (1 - self.b2) * g * g
            mhat = self.m[name] / (1 - self.b1 ** self.t)
            vhat = self.v[name] / (1 - self.b2 ** self.t)
            p -= self.lr * mhat / (np.sqrt(vhat) + self.eps)


class _Sgd:
    def __init__(self, lr):
        self.lr = lr

    def step(self, params_and_grads):
        for _, p, g in params_and_grads:
            p -= self.lr * g


def _batch_fwd(q_rows, z, ybar):
    """Mean forward-corrected loss and per-sample logit gradients."""
    p = losses.softmax(z)
    qc = q_rows[:, ybar].T                              # (B, C)
    pbar = np.maximum(losses.PROB_CLAMP, (p * qc).sum(axis=1))
    loss = float(-np.log(pbar).mean())
    grad = -(p * qc - p * pbar[:, None]) / pbar[:, None] / z.shape[0]
    return loss, grad


def _batch_ce(z, y):
    p = losses.softmax(z)
    picked = np.maximum(losses.PROB_CLAMP, p[np.arange(z.shape[0]), y])
    loss = float(-np.log(picked).mean())
    grad = p.copy()
    grad[np.arange(z.shape[0]), y] -= 1.0
    return loss, grad / z.shape[0]


def _batch_ure(q_inv, z, ybar, correction):
    """Class-aggregated inverse-corrected risk with nn/ga corrections.

    Components are aggregated per batch and per class; clipping (nn) and
    gradient reversal (ga) act on those aggregates.
    """
    b, c = z.shape
    p = losses.softmax(z)
    pcl = -np.log(np.maximum(losses.PROB_CLAMP, p))     # (B, C) per-class CE
    w = q_inv[ybar]                                     # (B, C) inverse rows
    comps = (w * pcl).mean(axis=0)                      # class-wise risk r_k
    neg = comps < 0
    if correction == "nn":
        loss = float(comps[~neg].sum())
        mask = (~neg).astype(float)
        sign = 1.0
    elif correction == "ga" and neg.any():
        loss = float(-comps[neg].sum())
        mask = neg.astype(float)
        sign = -1.0
    else:
        loss = float(comps.sum())
        mask = np.ones(c)
        sign = 1.0
    wm = w * mask                                       # masked class weights
    grad = sign * (wm.sum(axis=1, keepdims=True) * p - wm) / b
    return loss, grad


def _batch_cpe_t(theta, z, ybar):
    b, c = z.shape
    t = losses.cpe_t_matrix(theta)
    p = losses.softmax(z)
    tc = t[:, ybar].T
    pbar = np.maximum(losses.PROB_CLAMP, (p * tc).sum(axis=1))
    loss = float(-np.log(pbar).mean())
    grad_z = -(p * tc - p * pbar[:, None]) / pbar[:, None] / b
    # accumulate d loss / d t[r, ybar_i] = -p[i, r] / pbar_i / B, then chain
    # through each row's off-diagonal softmax
    dT = np.zeros((c, c))
    coeff = -p / pbar[:, None] / b                      # (B, C)
    for i in range(b):
        dT[:, ybar[i]] += coeff[i]
    np.fill_diagonal(dT, 0.0)
    grad_theta = np.zeros_like(theta)
    offcols = np.array([[j for j in range(c) if j != r] for r in range(c)])
    for r in range(c):
        s = t[r, offcols[r]]
        g = dT[r, offcols[r]]
        grad_theta[r] = s * (g - float(g @ s))
    return loss, grad_z, grad_theta


def train(ds: ComplementaryDataset, spec: LossSpec, cfg: TrainConfig,
          test: LabeledDataset) -> TrainReport:
    """Mini-batch training, deterministic given cfg.seed."""
    base = ds.base
    rng = np.random.default_rng(cfg.seed)
    params = ClassifierParams.init(cfg.arch, base.d, base.c, cfg.hidden, rng)
    opt = _Adam(cfg.learning_rate) if cfg.optimizer == "adam" else _Sgd(cfg.learning_rate)

    q_inv = None
    if spec.kind == "ure":
        q_inv = invert(spec.q)                          # raises SingularTransitionError
    theta = losses.cpe_t_init(base.c) if (spec.kind == "cpe" and spec.cpe_variant == "t") else None

    losses_curve, acc_curve = [], []
    n = base.n
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss, n_batches = 0.0, 0
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            x = base.features[idx]
            ybar = ds.cl[idx]
            y = base.labels[idx]
            z, cache = params._forward_cache(x)
            grad_theta = None
            if spec.kind == "ce":
                loss, grad_z = _batch_ce(z, y)
            elif spec.kind == "fwd":
                loss, grad_z = _batch_fwd(spec.q.rows, z, ybar)
            elif spec.kind == "ure":
                loss, grad_z = _batch_ure(q_inv, z, ybar, spec.ure_correction)
            elif spec.kind == "cpe":
                if spec.cpe_variant == "i":
                    loss, grad_z = _batch_ce(z, ybar)
                elif spec.cpe_variant == "f":
                    loss, grad_z = _batch_fwd(spec.q.rows, z, ybar)
                else:
                    loss, grad_z, grad_theta = _batch_cpe_t(theta, z, ybar)
            elif spec.kind == "combined":
                seed = spec.seed_set
                zs, cache_s = params._forward_cache(seed.features)
                ce_loss, ce_grad = _batch_ce(zs, seed.labels)
                fwd_loss, fwd_grad = _batch_fwd(spec.q.rows, z, ybar)
                w_cl = (1.0 - spec.alpha) * (base.c - 1)
                loss = losses.loss_combined_value(spec.alpha, ce_loss, fwd_loss, base.c)
                grads = params._backward(x, cache, w_cl * fwd_grad)
                grads_s = params._backward(seed.features, cache_s, spec.alpha * ce_grad)
                for k in grads_s:
                    grads[k] = grads[k] + grads_s[k]
                _apply(opt, params, grads, cfg.weight_decay)
                epoch_loss += loss
                n_batches += 1
                continue
            else:
                raise InvalidArgumentError(f"unknown loss kind {spec.kind!r}")
            grads = params._backward(x, cache, grad_z)
            if grad_theta is not None:
                grads["theta"] = grad_theta
            _apply(opt, params, grads, cfg.weight_decay, theta=theta)
            epoch_loss += loss
            n_batches += 1
        losses_curve.append(epoch_loss / n_batches)
        acc_curve.append(evaluate(params, test)[0])

    acc, per_class = evaluate(params, test)
    return TrainReport(train_loss=losses_curve, test_acc=acc_curve, params=params,
                       final_accuracy=acc, per_class_accuracy=list(per_class))


def _apply(opt, params, grads, weight_decay, theta=None):
    items = []
    for name, p in params.param_items():
        g = grads[name]
        if weight_decay and name.startswith("w"):
            g = g + weight_decay * p
        items.append((name, p, g))
    if theta is not None and "theta" in grads:
        items.append(("theta", theta, grads["theta"]))
    opt.step(items)


def evaluate(params: ClassifierParams, test: LabeledDataset):
    """Accuracy and per-class accuracy under argmax decoding (ties to lowest index)."""
    if test.n == 0:
        raise InvalidArgumentError("empty test set")
    preds = params.logits(test.features).argmax(axis=1)
    correct = preds == test.labels
    acc = float(correct.mean())
    per_class = np.zeros(test.c)
    for k in range(test.c):
        idx = test.labels == k
        per_class[k] = float(correct[idx].mean()) if idx.any() else 0.0
    return acc, per_class

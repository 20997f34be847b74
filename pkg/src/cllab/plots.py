"""Figure rendering for the report paths.

Every CLI report command that writes delimited output can also render the
matching matplotlib figure next to it.  All figures use the Agg backend so
they work headless and byte-deterministically.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .transition import TransitionMatrix

_SAVE_KW = {"dpi": 120, "bbox_inches": "tight", "metadata": {"Software": None}}


def transition_heatmap(q: TransitionMatrix, path, title: str = "transition matrix") -> None:
    fig, ax = plt.subplots(figsize=(5, 4.2))
    im = ax.imshow(q.rows, cmap="viridis", vmin=0.0)
    ax.set_xlabel("complementary label")
    ax.set_ylabel("true label")
    ax.set_title(title)
    fig.colorbar(im, ax=ax, label="p(ybar | y)")
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def learning_curves(train_loss, test_acc, path, title: str = "training") -> None:
    epochs = np.arange(1, len(train_loss) + 1)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.plot(epochs, train_loss, lw=1.2)
    ax1.set_xlabel("epoch")
    ax1.set_ylabel("train loss (nats)")
    ax2.plot(epochs, test_acc, lw=1.2, color="tab:green")
    ax2.set_xlabel("epoch")
    ax2.set_ylabel("test accuracy")
    ax2.set_ylim(0, 1)
    fig.suptitle(title)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def entropy_ordering_scatter(pairs, path) -> None:
    pairs = np.asarray(pairs)
    fig, ax = plt.subplots(figsize=(4.5, 4.2))
    ax.scatter(pairs[:, 0], pairs[:, 1], s=6, alpha=0.4)
    lo = min(pairs.min(), 0)
    hi = pairs.max() * 1.02
    ax.plot([lo, hi], [lo, hi], "k--", lw=0.8, label="equal entropy")
    ax.set_xlabel("H(Y|Ybar), dense (bits)")
    ax.set_ylabel("H(Y|Ybar), sparsified (bits)")
    ax.legend()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def compare_bars(rows, path, baseline: str | None = None) -> None:
    """Grouped accuracy bars for grid-comparison cells.

    rows: list of dicts with keys design, loss, mean, std (failed cells have
    mean None and are skipped).
    """
    ok = [r for r in rows if r.get("mean") is not None]
    if not ok:
        return
    labels = [f"{r['design']}/{r['loss']}" for r in ok]
    means = [r["mean"] for r in ok]
    stds = [r.get("std") or 0.0 for r in ok]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.8 * len(ok)), 3.8))
    x = np.arange(len(ok))
    ax.bar(x, means, yerr=stds, capsize=3, color="tab:blue")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel("test accuracy")
    if baseline:
        ax.set_title(f"delta baseline: {baseline}")
    ax.set_ylim(0, 1)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)

"""Experiment driver: generate, annotate, analyze, simulate, train, compare.

Exit codes: 0 success, 1 runtime failure, 2 usage/validation error.
Report commands write delimited output (CSV/JSON) and, unless --no-plots is
given, render the matching figure next to it.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import (
    infotheory,
    learner,
    metrics,
    plots,
    protocol,
    transition,
)
from .errors import CllabError, SingularTransitionError


def _sig12(x):
    return float(f"{float(x):.12g}")


def _round_floats(doc):
    if isinstance(doc, float):
        return _sig12(doc)
    if isinstance(doc, list):
        return [_round_floats(v) for v in doc]
    if isinstance(doc, dict):
        return {k: _round_floats(v) for k, v in doc.items()}
    return doc


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(_round_floats(doc), indent=2) + "\n")


def _build_q(args, c: int):
    if getattr(args, "q_file", None):
        return transition.load(args.q_file)
    builder = getattr(args, "q_builder", None)
    seed = getattr(args, "q_seed", None)
    if seed is None:
        seed = args.seed
    if builder == "uniform":
        return transition.make_uniform(c)
    if builder == "biased3":
        return transition.make_biased_three_level(c, seed)
    if builder == "bicl":
        return transition.make_bicl_analysis(c, args.k, seed)
    if builder == "sparse-from-dense":
        rng = np.random.default_rng(seed)
        dense = infotheory.random_dense_q(c, rng)
        return transition.make_sparse_from_dense(dense, args.k, seed + 1)
    return None


# ----------------------------------------------------------------- gen

def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    train, test = protocol.gen_blobs_split(args.c, args.n_per_class, args.test_per_class,
                                           args.d, args.spread, args.seed)
    (out / "train.csv").write_text(protocol.dataset_to_csv(train))
    (out / "test.csv").write_text(protocol.dataset_to_csv(test))
    print(f"wrote {train.n} train and {test.n} test samples "
          f"(C={args.c}, d={args.d}, spread={args.spread}) to {out}")
    return 0


# ------------------------------------------------------------ annotate

def cmd_annotate(args) -> int:
    data_path = Path(args.data)
    ds = protocol.dataset_from_csv(data_path.read_text(), c=args.c)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seeds = np.random.SeedSequence(args.seed).spawn(3)

    if args.mode == "analysis":
        ca = protocol.assign_candidates("per-class", ds.labels, ds.c, args.k, seeds[0])
        cds = protocol.annotate_rule_based(ds, ca, ds.labels, args.epsilon, seeds[1])
    elif args.mode == "practical":
        clusters = args.clusters if args.clusters else ds.c
        cm = protocol.kmeans(ds.features, clusters, args.max_iters, seeds[0])
        ca = protocol.assign_candidates("per-cluster", cm.assignments, ds.c, args.k, seeds[1])
        cds = protocol.annotate_rule_based(ds, ca, cm.assignments, args.epsilon, seeds[2])
    elif args.mode == "synthetic-q":
        q = _build_q(args, ds.c)
        if q is None:
            print("synthetic-q mode needs --q-file or --q-builder", file=sys.stderr)
            return 2
        cds = protocol.sample_from_q(ds, q, seeds[1])
    else:
        print(f"unknown mode {args.mode!r}", file=sys.stderr)
        return 2

    cl_path = out / (data_path.stem + "_cl.csv")
    cl_path.write_text(protocol.complementary_to_csv(cds))
    report = metrics.dataset_report(cds, smoothing=args.smoothing)
    _write_json(out / "report.json", json.loads(report.to_json()))
    if not args.no_plots:
        plots.transition_heatmap(report.empirical_q, out / "empirical_q.png",
                                 title="empirical transition")
    print(f"noise_rate={report.noise_rate:.6g} imbalance={report.imbalance_ratio:.6g} "
          f"h_cond_uniform={report.h_cond_bits_uniform:.6g} bits -> {cl_path}")
    return 0


# ------------------------------------------------------------- analyze

def cmd_analyze(args) -> int:
    path = Path(args.input)
    if not path.exists():
        print(f"no such file: {path}", file=sys.stderr)
        return 2
    if path.suffix == ".json":
        q = transition.load(path)
        prior = infotheory.ClassPrior.uniform(q.c)
    else:
        cds = protocol.complementary_from_csv(path.read_text(), c=args.c)
        q = metrics.empirical_transition(cds, smoothing=args.smoothing)
        if args.uniform_prior:
            prior = infotheory.ClassPrior.uniform(q.c)
        else:
            prior = infotheory.ClassPrior.from_labels(cds.base.labels, q.c)
    report = infotheory.info_report(q, prior, i_yx_bits=args.iyx)
    print(f"h_cond_bits={report.cond_entropy_bits:.6g}")
    print(f"i_yybar_bits={report.mutual_info_bits:.6g}")
    print(f"fano_bound={report.fano_bound:.6g}")
    if args.out:
        _write_json(Path(args.out), json.loads(report.to_json()))
    return 0


# ----------------------------------------------------- simulate-entropy

def cmd_simulate_entropy(args) -> int:
    pairs = infotheory.entropy_ordering_trials(args.c, args.k, args.trials, args.seed)
    frac = float((pairs[:, 1] <= pairs[:, 0] + infotheory.ORDERING_SLACK).mean())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["trial,h_dense,h_sparse"]
    for t, (hd, hs) in enumerate(pairs):
        lines.append(f"{t},{hd:.12g},{hs:.12g}")
    (out / "trials.csv").write_text("\n".join(lines) + "\n")
    _write_json(out / "result.json", {
        "c": args.c, "k": args.k, "trials": args.trials,
        "seed": args.seed, "fraction": frac,
    })
    if not args.no_plots:
        plots.entropy_ordering_scatter(pairs, out / "entropy_ordering.png")
    print(f"{frac:.3f}")
    return 0


# --------------------------------------------------------------- train

def _seed_subset(ds: protocol.LabeledDataset, per_class: int, seed: int):
    rng = np.random.default_rng(seed)
    idx = []
    for k in range(ds.c):
        members = np.flatnonzero(ds.labels == k)
        take = min(per_class, members.size)
        idx.extend(rng.choice(members, size=take, replace=False))
    idx = np.array(sorted(int(i) for i in idx))
    return idx, protocol.LabeledDataset(
        n=idx.size, d=ds.d, c=ds.c,
        features=ds.features[idx], labels=ds.labels[idx])


def _estimate_q_from_seed_set(cds: protocol.ComplementaryDataset, idx, smoothing: float):
    c = cds.base.c
    table = np.zeros((c, c), dtype=np.int64)
    np.add.at(table, (cds.base.labels[idx], cds.cl[idx]), 1)
    return transition.estimate_from_pairs(transition.PairCounts(c=c, counts=table), smoothing)


def _make_loss_spec(args, cds: protocol.ComplementaryDataset):
    c = cds.base.c
    q = _build_q(args, c)
    seed_set = None
    if args.seed_per_class:
        idx, seed_set = _seed_subset(cds.base, args.seed_per_class, args.seed)
        if q is None and args.loss in ("fwd", "ure", "cpe", "combined"):
            q = _estimate_q_from_seed_set(cds, idx, args.smoothing)
    if args.loss == "combined" and seed_set is None:
        raise CllabError("combined loss requires --seed-per-class")
    return learner.LossSpec(kind=args.loss, q=q, ure_correction=args.correction,
                            cpe_variant=args.variant, alpha=args.alpha, seed_set=seed_set)


def cmd_train(args) -> int:
    data_path = Path(args.data)
    text = data_path.read_text()
    header = text.splitlines()[0].split(",")
    if "ybar" in header:
        cds = protocol.complementary_from_csv(text, c=args.c)
    else:
        ds = protocol.dataset_from_csv(text, c=args.c)
        # no complementary labels; only the plain CE baseline applies
        cds = protocol.ComplementaryDataset(base=ds, cl=ds.labels.copy())
        if args.loss != "ce":
            print("data file has no ybar column; only --loss ce applies", file=sys.stderr)
            return 2
    test = protocol.dataset_from_csv(Path(args.test).read_text(), c=cds.base.c)

    try:
        spec = _make_loss_spec(args, cds)
        cfg = learner.TrainConfig(epochs=args.epochs, batch_size=args.batch_size,
                                  learning_rate=args.lr, weight_decay=args.weight_decay,
                                  optimizer=args.optimizer, arch=args.arch,
                                  hidden=args.hidden, seed=args.seed)
        report = learner.train(cds, spec, cfg, test)
    except SingularTransitionError as exc:
        print(f"singular-transition: {exc}\n"
              "remedy: use --loss fwd or --loss cpe, which do not invert Q",
              file=sys.stderr)
        return 1
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "curves.csv").write_text(report.curves_csv())
    _write_json(out / "result.json", json.loads(report.to_json()))
    if not args.no_plots:
        plots.learning_curves(report.train_loss, report.test_acc, out / "curves.png",
                              title=f"loss={args.loss}")
    print(f"final_accuracy={report.final_accuracy:.6g} ({args.loss}, "
          f"{cfg.epochs} epochs) -> {out}")
    return 0


# ------------------------------------------------------------- compare

def _run_cell(design, loss_kind, seed, args):
    seeds = np.random.SeedSequence([args.seed, seed]).spawn(4)
    train_ds, test_ds = protocol.gen_blobs_split(
        args.c, args.n_per_class, args.test_per_class, args.d, args.spread, seeds[0])
    ns = argparse.Namespace(q_file=None, q_builder=design, q_seed=args.seed,
                            k=args.k, seed=args.seed)
    q = _build_q(ns, args.c)
    cds = protocol.sample_from_q(train_ds, q, seeds[1])
    kind, _, variant = loss_kind.partition("-")
    spec = learner.LossSpec(
        kind=kind, q=q,
        ure_correction=variant if kind == "ure" and variant else "none",
        cpe_variant=variant if kind == "cpe" and variant else "f")
    cfg = learner.TrainConfig(epochs=args.epochs, batch_size=args.batch_size,
                              learning_rate=args.lr, weight_decay=args.weight_decay,
                              optimizer=args.optimizer, arch=args.arch,
                              hidden=args.hidden, seed=seed)
    report = learner.train(cds, spec, cfg, test_ds)
    return report.final_accuracy


def cmd_compare(args) -> int:
    designs = [s for s in args.designs.split(",") if s]
    loss_kinds = [s for s in args.losses.split(",") if s]
    if not designs or not loss_kinds or args.seeds < 1:
        print("empty grid", file=sys.stderr)
        return 2
    cells = []
    for design in designs:
        for loss_kind in loss_kinds:
            accs, status = [], "ok"
            for s in range(args.seeds):
                try:
                    accs.append(_run_cell(design, loss_kind, s, args))
                except SingularTransitionError:
                    status = "singular-transition"
                    break
            if status == "ok":
                cells.append({"design": design, "loss": loss_kind, "status": "ok",
                              "mean": float(np.mean(accs)),
                              "std": float(np.std(accs)), "delta": None})
            else:
                cells.append({"design": design, "loss": loss_kind, "status": status,
                              "mean": None, "std": None, "delta": None})
    base = {c["loss"]: c["mean"] for c in cells
            if c["design"] == args.baseline and c["mean"] is not None}
    for c in cells:
        if c["mean"] is not None and c["loss"] in base:
            c["delta"] = c["mean"] - base[c["loss"]]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["design,loss,status,mean,std,delta"]
    for c in cells:
        mean = "" if c["mean"] is None else f"{c['mean']:.6g}"
        std = "" if c["std"] is None else f"{c['std']:.6g}"
        delta = "" if c["delta"] is None else f"{c['delta']:.6g}"
        lines.append(f"{c['design']},{c['loss']},{c['status']},{mean},{std},{delta}")
    (out / "summary.csv").write_text("\n".join(lines) + "\n")
    _write_json(out / "summary.json", {"baseline": args.baseline, "cells": cells})
    if not args.no_plots:
        plots.compare_bars(cells, out / "summary.png", baseline=args.baseline)
    print("\n".join(lines))
    return 0


# ------------------------------------------------------------- parsing

def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out")
    p.add_argument("--no-plots", action="store_true", help="skip figure rendering")


def _add_train_flags(p):
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--weight-decay", type=float, default=1e-5)
    p.add_argument("--optimizer", choices=["adam", "sgd"], default="adam")
    p.add_argument("--arch", choices=["linear", "mlp"], default="mlp")
    p.add_argument("--hidden", type=int, default=64)


def _positive(name):
    def check(value):
        v = int(value)
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be >= 1")
        return v
    return check


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cllab",
                                     description="complementary-label learning lab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate synthetic Gaussian blob datasets")
    p.add_argument("--c", type=_positive("c"), default=10)
    p.add_argument("--n-per-class", type=_positive("n-per-class"), default=100)
    p.add_argument("--test-per-class", type=_positive("test-per-class"), default=50)
    p.add_argument("--d", type=_positive("d"), default=8)
    p.add_argument("--spread", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("annotate", help="collect complementary labels")
    p.add_argument("--data", required=True)
    p.add_argument("--mode", choices=["analysis", "practical", "synthetic-q"],
                   default="analysis")
    p.add_argument("--c", type=int, default=None)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--clusters", type=int, default=0, help="K for practical mode (default C)")
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--smoothing", type=float, default=1.0)
    p.add_argument("--q-file", default=None)
    p.add_argument("--q-builder",
                   choices=["uniform", "biased3", "bicl", "sparse-from-dense"], default=None)
    p.add_argument("--q-seed", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("analyze", help="entropy / mutual information / error floor")
    p.add_argument("--input", required=True, help="transition .json or complementary .csv")
    p.add_argument("--c", type=int, default=None)
    p.add_argument("--uniform-prior", action="store_true")
    p.add_argument("--iyx", type=float, default=0.0,
                   help="assumed I(Y;X) in bits for the error floor")
    p.add_argument("--smoothing", type=float, default=0.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate-entropy", help="sparse-vs-dense entropy ordering trials")
    p.add_argument("--c", type=_positive("c"), default=10)
    p.add_argument("--k", type=_positive("k"), default=4)
    p.add_argument("--trials", type=_positive("trials"), default=1000)
    _add_common(p)
    p.set_defaults(func=cmd_simulate_entropy)

    p = sub.add_parser("train", help="train a classifier from complementary labels")
    p.add_argument("--data", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--c", type=int, default=None)
    p.add_argument("--loss", choices=["ce", "fwd", "ure", "cpe", "combined"], default="fwd")
    p.add_argument("--correction", choices=["none", "nn", "ga"], default="none")
    p.add_argument("--variant", choices=["i", "f", "t"], default="f")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--q-file", default=None)
    p.add_argument("--q-builder",
                   choices=["uniform", "biased3", "bicl", "sparse-from-dense"], default=None)
    p.add_argument("--q-seed", type=int, default=None)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--seed-per-class", type=int, default=0,
                   help="estimate Q from this many true-labeled samples per class")
    p.add_argument("--smoothing", type=float, default=0.0)
    _add_train_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("compare", help="grid of (Q design x loss) over seeds")
    p.add_argument("--designs", default="uniform,biased3,bicl")
    p.add_argument("--losses", default="fwd")
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--baseline", default="uniform")
    p.add_argument("--c", type=int, default=10)
    p.add_argument("--n-per-class", type=int, default=100)
    p.add_argument("--test-per-class", type=int, default=50)
    p.add_argument("--d", type=int, default=8)
    p.add_argument("--spread", type=float, default=1.0)
    p.add_argument("--k", type=int, default=4)
    _add_train_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CllabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

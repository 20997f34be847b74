import numpy as np
import pytest

from cllab import learner
from cllab.errors import InvalidArgumentError, SingularTransitionError
from cllab.fixtures import demo_sparse_biased_10
from cllab.learner import ClassifierParams, LossSpec, TrainConfig, evaluate, train
from cllab.learner import _batch_ure
from cllab.protocol import (
    ComplementaryDataset,
    LabeledDataset,
    gen_blobs,
    gen_blobs_split,
    sample_from_q,
)
from cllab.transition import invert, make_bicl_analysis, make_uniform


def small_setup(c=6, seed=0, q=None):
    q = q or make_uniform(c)
    train_ds, test_ds = gen_blobs_split(c, 60, 30, 4, 1.0, seed=seed)
    cds = sample_from_q(train_ds, q, seed=seed + 1)
    return cds, test_ds, q


class TestTrain:
    def test_bitwise_deterministic(self):
        cds, test_ds, q = small_setup()
        cfg = TrainConfig(epochs=10, seed=5)
        a = train(cds, LossSpec(kind="fwd", q=q), cfg, test_ds)
        b = train(cds, LossSpec(kind="fwd", q=q), cfg, test_ds)
        assert a.train_loss == b.train_loss
        assert a.test_acc == b.test_acc

    def test_curve_lengths_match_epochs(self):
        cds, test_ds, q = small_setup()
        rep = train(cds, LossSpec(kind="fwd", q=q), TrainConfig(epochs=7, seed=1), test_ds)
        assert len(rep.train_loss) == 7
        assert len(rep.test_acc) == 7

    def test_fwd_learns_separable_blobs(self):
        # well-conditioned candidate matrix; confirms the desk-scale bar
        q = make_bicl_analysis(10, 4, seed=13)
        train_ds, test_ds = gen_blobs_split(10, 100, 50, 8, 1.0, seed=7)
        cds = sample_from_q(train_ds, q, seed=2)
        rep = train(cds, LossSpec(kind="fwd", q=q), TrainConfig(epochs=100, seed=3), test_ds)
        assert rep.final_accuracy >= 0.90

    def test_fwd_and_cpe_f_identical_curves(self):
        cds, test_ds, q = small_setup()
        cfg = TrainConfig(epochs=15, seed=2)
        a = train(cds, LossSpec(kind="fwd", q=q), cfg, test_ds)
        b = train(cds, LossSpec(kind="cpe", q=q, cpe_variant="f"), cfg, test_ds)
        assert a.train_loss == b.train_loss

    def test_ure_rejects_singular_matrix(self):
        cds, test_ds, _ = small_setup(c=10)
        spec = LossSpec(kind="ure", q=demo_sparse_biased_10())
        with pytest.raises(SingularTransitionError):
            train(cds, spec, TrainConfig(epochs=2, seed=0), test_ds)

    @pytest.mark.parametrize("kind,kwargs", [
        ("ce", {}),
        ("ure", {"ure_correction": "nn"}),
        ("ure", {"ure_correction": "ga"}),
        ("cpe", {"cpe_variant": "i"}),
        ("cpe", {"cpe_variant": "t"}),
    ])
    def test_all_losses_run(self, kind, kwargs):
        cds, test_ds, q = small_setup()
        spec = LossSpec(kind=kind, q=q, **kwargs)
        rep = train(cds, spec, TrainConfig(epochs=3, seed=4), test_ds)
        assert np.isfinite(rep.train_loss).all()

    def test_combined_runs_and_uses_seed_set(self):
        cds, test_ds, q = small_setup()
        idx = np.concatenate([np.flatnonzero(cds.base.labels == k)[:5]
                              for k in range(cds.base.c)])
        seed_set = LabeledDataset(n=idx.size, d=cds.base.d, c=cds.base.c,
                                  features=cds.base.features[idx],
                                  labels=cds.base.labels[idx])
        spec = LossSpec(kind="combined", q=q, alpha=0.5, seed_set=seed_set)
        rep = train(cds, spec, TrainConfig(epochs=10, seed=1), test_ds)
        assert rep.final_accuracy > 1.0 / cds.base.c


class TestUreCorrections:
    def test_nn_loss_only_sums_non_negative_components(self):
        rng = np.random.default_rng(0)
        c = 10
        q_inv = invert(make_uniform(c))
        z = rng.normal(scale=5.0, size=(16, c))
        ybar = rng.integers(c, size=16)
        loss_nn, _ = _batch_ure(q_inv, z, ybar, "nn")
        assert loss_nn >= 0

    def test_ga_reverses_on_negative_components(self):
        c = 10
        q_inv = invert(make_uniform(c))
        # concentrate mass on the observed CL to force a negative component
        z = np.zeros((4, c))
        z[:, 2] = 12.0
        ybar = np.full(4, 2)
        loss_ga, grad_ga = _batch_ure(q_inv, z, ybar, "ga")
        loss_plain, grad_plain = _batch_ure(q_inv, z, ybar, "none")
        # the observed-CL component is negative even though the total is not
        comps = (q_inv[ybar] * -np.log(np.maximum(1e-12, np.exp(z) /
                 np.exp(z).sum(axis=1, keepdims=True)))).mean(axis=0)
        assert comps.min() < 0
        assert loss_ga == pytest.approx(-comps[comps < 0].sum())
        assert not np.allclose(grad_ga, grad_plain)


class TestEvaluate:
    def test_memorizing_params_score_one(self):
        test_ds = gen_blobs(5, 2, 3, 0.5, seed=0)
        params = ClassifierParams.init("linear", 3, 5, 0, np.random.default_rng(0))
        # scale the class means into the weights so argmax recovers labels
        means = np.stack([test_ds.features[test_ds.labels == k].mean(axis=0)
                          for k in range(5)])
        params.w1 = (10 * means).T
        params.b1 = -5 * (means ** 2).sum(axis=1)
        acc, per_class = evaluate(params, test_ds)
        assert acc == 1.0
        assert np.all(per_class == 1.0)

    def test_zero_weights_tie_break_to_class_zero(self):
        test_ds = gen_blobs(4, 25, 3, 1.0, seed=1)
        params = ClassifierParams.init("linear", 3, 4, 0, np.random.default_rng(0))
        params.w1 = np.zeros_like(params.w1)
        acc, _ = evaluate(params, test_ds)
        assert acc == (test_ds.labels == 0).mean()

    def test_accuracy_is_weighted_mean_of_per_class(self):
        test_ds = gen_blobs(4, 30, 3, 1.0, seed=2)
        params = ClassifierParams.init("mlp", 3, 4, 8, np.random.default_rng(3))
        acc, per_class = evaluate(params, test_ds)
        freqs = np.bincount(test_ds.labels) / test_ds.n
        assert acc == pytest.approx(float(freqs @ per_class), abs=1e-12)

    def test_decode_invariant_to_logit_shift(self):
        test_ds = gen_blobs(4, 30, 3, 1.0, seed=4)
        params = ClassifierParams.init("linear", 3, 4, 0, np.random.default_rng(5))
        preds = params.logits(test_ds.features).argmax(axis=1)
        params.b1 = params.b1 + 17.0
        shifted = params.logits(test_ds.features).argmax(axis=1)
        assert np.array_equal(preds, shifted)

    def test_empty_test_set_rejected(self):
        params = ClassifierParams.init("linear", 2, 3, 0, np.random.default_rng(0))
        empty = LabeledDataset(n=0, d=2, c=3,
                               features=np.empty((0, 2)), labels=np.empty(0, dtype=np.int64))
        with pytest.raises(InvalidArgumentError):
            evaluate(params, empty)


class TestLossSpecValidation:
    def test_fwd_requires_q(self):
        with pytest.raises(InvalidArgumentError):
            LossSpec(kind="fwd")

    def test_combined_requires_seed_set(self):
        with pytest.raises(InvalidArgumentError):
            LossSpec(kind="combined", q=make_uniform(4))

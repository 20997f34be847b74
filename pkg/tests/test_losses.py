import numpy as np
import pytest

from cllab import losses
from cllab.transition import TransitionMatrix, invert, make_uniform

from conftest import finite_difference, max_rel_error


def permutation_q(c, shift=1):
    rows = np.zeros((c, c))
    for k in range(c):
        rows[k, (k + shift) % c] = 1.0
    return TransitionMatrix(c=c, rows=rows)


def hard_logits(c, at, scale=50.0):
    z = np.zeros(c)
    z[at] = scale
    return z


class TestForwardLoss:
    def test_uniform_q_one_hot_prediction(self):
        q = make_uniform(10)
        loss, _ = losses.loss_fwd(q, hard_logits(10, at=3), ybar=7)
        assert loss == pytest.approx(-np.log(1 / 9), abs=1e-6)

    def test_cyclic_q_perfect_prediction(self):
        q = permutation_q(10)
        loss, _ = losses.loss_fwd(q, hard_logits(10, at=2), ybar=3)
        assert loss == pytest.approx(0.0, abs=1e-9)

    def test_probability_sanity(self):
        rng = np.random.default_rng(0)
        q = make_uniform(8)
        z = rng.normal(size=8)
        p = losses.softmax(z)
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        assert (q.rows.T @ p).sum() == pytest.approx(1.0, abs=1e-9)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        q = make_uniform(6)
        worst = 0.0
        for _ in range(100):
            z = rng.normal(scale=2.0, size=6)
            ybar = int(rng.integers(6))
            _, g = losses.loss_fwd(q, z, ybar)
            gn = finite_difference(lambda zz: losses.loss_fwd(q, zz, ybar)[0], z.copy())
            worst = max(worst, max_rel_error(g, gn))
        assert worst < 1e-4


class TestUreLoss:
    @pytest.mark.parametrize("c", [3, 5, 10])
    def test_unbiasedness_brute_force(self, c):
        q = make_uniform(c)
        q_inv = invert(q)
        rng = np.random.default_rng(c)
        for _ in range(20):
            z = rng.normal(scale=2.0, size=c)
            pcl = losses.per_class_losses(z)
            for y in range(c):
                total = sum(q.rows[y, ybar] * losses.loss_ure(q_inv, z, ybar).sum()
                            for ybar in range(c))
                assert abs(total - pcl[y]) < 1e-9

    def test_permutation_q_reduces_to_shifted_ce(self):
        c = 6
        q = permutation_q(c)
        q_inv = invert(q)
        rng = np.random.default_rng(2)
        z = rng.normal(size=c)
        ybar = 4
        # observing ybar under a cyclic shift pins the true class at ybar-1
        expected = losses.cross_entropy(z, (ybar - 1) % c)[0]
        assert losses.loss_ure(q_inv, z, ybar).sum() == pytest.approx(expected, abs=1e-9)

    def test_negative_component_is_reachable(self):
        # confident mass on the observed CL drives a risk component negative
        c = 10
        q_inv = invert(make_uniform(c))
        comps = losses.loss_ure(q_inv, hard_logits(c, at=2, scale=10.0), ybar=2)
        assert comps.min() < 0

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        q_inv = invert(make_uniform(6))
        worst = 0.0
        for _ in range(100):
            z = rng.normal(scale=2.0, size=6)
            ybar = int(rng.integers(6))
            g = losses.ure_grad(q_inv, z, ybar)
            gn = finite_difference(lambda zz: losses.loss_ure(q_inv, zz, ybar).sum(), z.copy())
            worst = max(worst, max_rel_error(g, gn))
        assert worst < 1e-4


class TestCpeLoss:
    def test_f_equals_fwd_exactly(self):
        rng = np.random.default_rng(4)
        q = make_uniform(7)
        for _ in range(50):
            z = rng.normal(scale=3.0, size=7)
            ybar = int(rng.integers(7))
            lf, gf = losses.loss_fwd(q, z, ybar)
            lc, gc = losses.loss_cpe("f", q, z, ybar)
            assert lf == lc
            assert np.array_equal(gf, gc)

    def test_t_at_uniform_init_equals_fwd_with_uniform_q(self):
        c = 8
        theta = losses.cpe_t_init(c)
        q = make_uniform(c)
        rng = np.random.default_rng(5)
        z = rng.normal(size=c)
        lt, gz, _ = losses.loss_cpe("t", theta, z, ybar=3)
        lf, gf = losses.loss_fwd(q, z, ybar=3)
        assert lt == pytest.approx(lf, abs=1e-12)
        assert np.allclose(gz, gf, atol=1e-12)

    def test_i_is_plain_cross_entropy(self):
        c = 5
        loss_hit, _ = losses.loss_cpe("i", None, hard_logits(c, at=2), ybar=2)
        loss_miss, _ = losses.loss_cpe("i", None, hard_logits(c, at=1), ybar=2)
        assert loss_hit == pytest.approx(0.0, abs=1e-9)
        assert loss_miss > 10

    def test_t_gradients_match_finite_differences(self):
        rng = np.random.default_rng(6)
        c = 5
        worst_z, worst_t = 0.0, 0.0
        for _ in range(50):
            theta = rng.normal(scale=0.5, size=(c, c - 1))
            z = rng.normal(scale=2.0, size=c)
            ybar = int(rng.integers(c))
            _, gz, gt = losses.loss_cpe("t", theta, z, ybar)
            gzn = finite_difference(lambda zz: losses.loss_cpe("t", theta, zz, ybar)[0], z.copy())
            gtn = finite_difference(lambda tt: losses.loss_cpe("t", tt, z, ybar)[0], theta.copy())
            worst_z = max(worst_z, max_rel_error(gz, gzn))
            worst_t = max(worst_t, max_rel_error(gt, gtn))
        assert worst_z < 1e-4
        assert worst_t < 1e-4


class TestCombinedLoss:
    def test_alpha_one_is_seed_ce(self):
        assert losses.loss_combined_value(1.0, 2.5, 99.0, c=10) == 2.5

    def test_alpha_zero_is_scaled_fwd(self):
        assert losses.loss_combined_value(0.0, 99.0, 1.2, c=10) == pytest.approx(9 * 1.2)

    def test_hand_value(self):
        assert losses.loss_combined_value(0.5, 2.0, 1.0, c=10) == pytest.approx(5.5)

    def test_rejects_bad_alpha(self):
        with pytest.raises(ValueError):
            losses.loss_combined_value(1.5, 1.0, 1.0, c=10)

"""Proximal operators against brute-force minimization oracles."""

import json
import math

import numpy as np
import pytest

from expofuse import ParameterError, ProxSpec, prox_apply, regularizer_value, total_variation


def grid_argmin(a: float, phi, lo=-2.0, hi=2.0, step=1e-4):
    """Exhaustive scalar minimizer of 0.5*(a-m)^2 + phi(m)."""
    grid = np.arange(lo, hi + step, step)
    vals = 0.5 * (a - grid) ** 2 + np.array([phi(m) for m in grid])
    return grid[int(np.argmin(vals))]


class TestSpecValidation:
    def test_unknown_kind(self):
        with pytest.raises(ParameterError):
            ProxSpec(kind="huber")

    def test_negative_tau(self):
        with pytest.raises(ParameterError):
            ProxSpec.soft_threshold(-0.1)

    def test_bad_box(self):
        with pytest.raises(ParameterError):
            ProxSpec.box(1.0, 1.0)

    def test_bad_inner_iters(self):
        with pytest.raises(ParameterError):
            ProxSpec(kind="tv2d", tau=0.1, inner_iters=0)


class TestClosedForms:
    def test_identity(self):
        a = np.array([[1.0, -2.0, 0.5]])
        assert np.array_equal(prox_apply(ProxSpec.identity(), a), a)

    def test_soft_threshold_values(self):
        spec = ProxSpec.soft_threshold(0.2)
        out = prox_apply(spec, np.array([[0.5, -0.1]]))
        assert np.allclose(out, [[0.3, 0.0]], atol=1e-15)

    def test_box_clamp(self):
        spec = ProxSpec.box(0.0, 1.0)
        out = prox_apply(spec, np.array([[-0.5, 0.4, 1.7]]))
        assert np.array_equal(out, np.array([[0.0, 0.4, 1.0]]))

    def test_box_idempotent(self):
        rng = np.random.default_rng(0)
        spec = ProxSpec.box(0.1, 0.9)
        a = rng.normal(size=(4, 6))
        once = prox_apply(spec, a)
        assert np.array_equal(prox_apply(spec, once), once)

    def test_zero_tau_is_identity(self):
        rng = np.random.default_rng(1)
        a = rng.normal(size=(2, 8))
        assert np.array_equal(prox_apply(ProxSpec.soft_threshold(0.0), a), a)
        assert np.array_equal(prox_apply(ProxSpec.tv2d(0.0), a, dims=(2, 4)), a)

    def test_scale_folds_into_threshold(self):
        spec = ProxSpec.soft_threshold(0.5)
        out = prox_apply(spec, np.array([[1.0]]), scale=0.4)
        assert abs(out[0, 0] - 0.8) < 1e-15


class TestGridOracle:
    @pytest.mark.parametrize(
        "spec,phi",
        [
            (ProxSpec.identity(), lambda m: 0.0),
            (ProxSpec.soft_threshold(0.2), lambda m: 0.2 * abs(m)),
            (ProxSpec.box(-0.3, 0.4), lambda m: 0.0 if -0.3 <= m <= 0.4 else math.inf),
            (ProxSpec.tv2d(0.3), lambda m: 0.0),  # TV of a single pixel is zero
        ],
    )
    def test_scalar_prox_matches_grid_search(self, spec, phi):
        for a in np.linspace(-1.0, 1.0, 21):
            got = prox_apply(spec, np.array([[a]]), dims=(1, 1))[0, 0]
            best = grid_argmin(a, phi)
            assert abs(got - best) <= 1e-4 + 1e-12

    def test_optimality_on_grid(self):
        # The prox output value never loses to any grid candidate.
        spec = ProxSpec.soft_threshold(0.2)
        grid = np.arange(-2.0, 2.0001, 1e-4)
        for a in np.linspace(-1.0, 1.0, 11):
            m = prox_apply(spec, np.array([[a]]))[0, 0]
            f_at_prox = 0.5 * (a - m) ** 2 + 0.2 * abs(m)
            f_grid = 0.5 * (a - grid) ** 2 + 0.2 * np.abs(grid)
            assert f_at_prox <= f_grid.min() + 1e-9


class TestNonExpansive:
    @pytest.mark.parametrize(
        "spec", [ProxSpec.identity(), ProxSpec.soft_threshold(0.3), ProxSpec.box(0.0, 1.0)]
    )
    def test_random_pairs(self, spec):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = rng.normal(size=(3, 5))
            b = rng.normal(size=(3, 5))
            da = prox_apply(spec, a) - prox_apply(spec, b)
            assert np.linalg.norm(da) <= np.linalg.norm(a - b) + 1e-12


class TestTotalVariation:
    def test_needs_dims(self):
        with pytest.raises(ParameterError):
            prox_apply(ProxSpec.tv2d(0.1), np.zeros((1, 4)))

    def test_constant_has_zero_tv(self):
        assert total_variation(np.full((2, 12), 0.3), (3, 4)) == 0.0

    def test_tv_value_manual(self):
        # 1x(2x2) image [[0, 1], [2, 3]]: forward diffs give rows
        # sqrt(2^2+1^2), sqrt(0+1), sqrt(2^2), 0.
        mat = np.array([[0.0, 1.0, 2.0, 3.0]])
        expected = math.sqrt(5.0) + 1.0 + 2.0
        assert abs(total_variation(mat, (2, 2)) - expected) < 1e-12

    def test_ramp_prox_decreases_objective(self):
        ramp = np.linspace(0.0, 1.0, 16).reshape(1, 16)
        spec = ProxSpec.tv2d(0.5, inner_iters=20)
        out = prox_apply(spec, ramp, dims=(16, 1))

        def objective(m):
            return 0.5 * np.sum((ramp - m) ** 2) + 0.5 * total_variation(m, (16, 1))

        assert objective(out) < objective(ramp)

    def test_prox_reduces_tv_of_noisy_image(self):
        rng = np.random.default_rng(3)
        img = rng.uniform(size=(2, 64))
        spec = ProxSpec.tv2d(0.4, inner_iters=30)
        out = prox_apply(spec, img, dims=(8, 8))
        assert total_variation(out, (8, 8)) < total_variation(img, (8, 8))


class TestRegularizerValue:
    def test_identity_zero(self):
        assert regularizer_value(ProxSpec.identity(), np.ones((3, 3))) == 0.0

    def test_soft_threshold_l1(self):
        value = regularizer_value(ProxSpec.soft_threshold(0.5), np.array([[1.0, -2.0]]))
        assert abs(value - 1.5) < 1e-15

    def test_box_sentinel(self):
        spec = ProxSpec.box(0.0, 1.0)
        assert regularizer_value(spec, np.array([[0.5, 1.2]])) == math.inf
        assert regularizer_value(spec, np.array([[0.5, 0.9]])) == 0.0

    def test_tv_weighted(self):
        mat = np.array([[0.0, 1.0, 2.0, 3.0]])
        expected = 0.25 * (math.sqrt(5.0) + 3.0)
        assert abs(regularizer_value(ProxSpec.tv2d(0.25), mat, dims=(2, 2)) - expected) < 1e-12


class TestSerialization:
    @pytest.mark.parametrize(
        "spec",
        [
            ProxSpec.identity(),
            ProxSpec.soft_threshold(0.25),
            ProxSpec.box(0.01, 10.0),
            ProxSpec.tv2d(1.5, inner_iters=12),
        ],
    )
    def test_round_trip(self, spec):
        again = ProxSpec.from_dict(json.loads(json.dumps(spec.to_dict())))
        assert again == spec

    def test_unknown_kind_rejected(self):
        with pytest.raises(ParameterError):
            ProxSpec.from_dict({"kind": "mystery"})

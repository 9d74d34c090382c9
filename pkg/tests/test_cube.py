"""Unfolding layout, fold/unfold round trips, and elementwise algebra."""

import numpy as np
import pytest

from expofuse import DimensionMismatchError, HsiCube, hadamard, mode1_fold, mode1_unfold


class TestHsiCube:
    def test_dims(self):
        cube = HsiCube(np.zeros((3, 4, 5)))
        assert (cube.bands, cube.width, cube.height) == (3, 4, 5)

    def test_rejects_wrong_ndim(self):
        with pytest.raises(DimensionMismatchError):
            HsiCube(np.zeros((3, 4)))

    def test_rejects_empty_axis(self):
        with pytest.raises(DimensionMismatchError):
            HsiCube(np.zeros((0, 4, 5)))

    def test_validate_rejects_nan(self):
        cube = HsiCube(np.array([[[0.5, np.nan]]]))
        with pytest.raises(ValueError):
            cube.validate()

    def test_validate_range_flag(self):
        cube = HsiCube(np.array([[[1.5]]]))
        with pytest.raises(ValueError):
            cube.validate(check_range=True)
        cube.validate(check_range=False)


class TestUnfold:
    def test_degenerate_single_entry(self):
        cube = HsiCube(np.array([[[0.5]]]))
        mat = mode1_unfold(cube)
        assert mat.shape == (1, 1)
        assert mat[0, 0] == 0.5

    def test_layout_2x2x1(self):
        a, b, c, d = 0.1, 0.2, 0.3, 0.4
        cube = HsiCube(np.array([[[a], [b]], [[c], [d]]]))
        mat = mode1_unfold(cube)
        assert np.array_equal(mat, np.array([[a, b], [c, d]]))

    def test_pixel_ordering_row_major(self):
        # Pixel (w, h) must land in column w*H + h.
        cube = HsiCube(np.arange(24, dtype=float).reshape(2, 3, 4))
        mat = mode1_unfold(cube)
        for w in range(3):
            for h in range(4):
                assert mat[1, w * 4 + h] == cube.data[1, w, h]

    def test_round_trip_bit_exact(self):
        rng = np.random.default_rng(3)
        cube = HsiCube(rng.uniform(size=(3, 4, 5)))
        back = mode1_fold(mode1_unfold(cube), cube.dims)
        assert np.array_equal(back.data, cube.data)

    def test_fold_trivial(self):
        cube = mode1_fold(np.array([[0.5]]), (1, 1, 1))
        assert cube.data[0, 0, 0] == 0.5

    def test_fold_dim_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            mode1_fold(np.zeros((2, 3)), (2, 1, 1))

    def test_unfold_preserves_multiset(self):
        rng = np.random.default_rng(9)
        cube = HsiCube(rng.uniform(size=(2, 5, 3)))
        assert np.array_equal(np.sort(mode1_unfold(cube).ravel()), np.sort(cube.data.ravel()))


class TestHadamard:
    def test_identity_element(self):
        rng = np.random.default_rng(1)
        a = rng.normal(size=(3, 4))
        assert np.array_equal(hadamard(a, np.ones_like(a)), a)

    def test_annihilator(self):
        rng = np.random.default_rng(2)
        a = rng.normal(size=(3, 4))
        assert np.array_equal(hadamard(a, np.zeros_like(a)), np.zeros_like(a))

    def test_direct_values(self):
        assert np.array_equal(hadamard(np.array([[2.0, 3.0]]), np.array([[4.0, 5.0]])),
                              np.array([[8.0, 15.0]]))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            hadamard(np.zeros((2, 3)), np.zeros((3, 2)))

    def test_no_silent_broadcasting(self):
        with pytest.raises(DimensionMismatchError):
            hadamard(np.zeros((1, 4)), np.zeros((3, 4)))

    def test_commutative_bitwise(self):
        rng = np.random.default_rng(4)
        a = rng.normal(size=(5, 7))
        b = rng.normal(size=(5, 7))
        assert np.array_equal(hadamard(a, b), hadamard(b, a))

    def test_associative_on_dyadic_values(self):
        # Small dyadic integers multiply exactly, so grouping cannot matter.
        rng = np.random.default_rng(5)
        a, b, c = (rng.integers(-8, 9, size=(4, 4)).astype(float) / 4.0 for _ in range(3))
        assert np.array_equal(hadamard(hadamard(a, b), c), hadamard(a, hadamard(b, c)))

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sidu_xai.errors import InvalidArgumentError
from sidu_xai.numerics import (
    bilinear_resize,
    gaussian_blur,
    l1_distance,
    l2_distance,
    minmax_normalize,
    softmax,
)


class TestBilinearResize:
    def test_constant_field(self):
        out = bilinear_resize(np.array([[0.7]]), 5, 9)
        assert out.shape == (5, 9)
        assert np.all(out == 0.7)

    def test_monotone_ramp(self):
        out = bilinear_resize(np.array([[0.0, 1.0], [0.0, 1.0]]), 2, 4)
        for row in out:
            assert np.all(np.diff(row) >= 0)
            assert row[0] >= 0.0 and row[-1] <= 1.0

    def test_checker_center_against_oracle(self):
        # brute-force per-pixel interpolation with half-pixel centers
        src = np.array([[0.0, 1.0], [1.0, 0.0]])
        out = bilinear_resize(src, 4, 4)
        for oy in range(4):
            for ox in range(4):
                sy = min(max((oy + 0.5) * 0.5 - 0.5, 0.0), 1.0)
                sx = min(max((ox + 0.5) * 0.5 - 0.5, 0.0), 1.0)
                y0, x0 = int(sy), int(sx)
                y1, x1 = min(y0 + 1, 1), min(x0 + 1, 1)
                wy, wx = sy - y0, sx - x0
                expected = (
                    src[y0, x0] * (1 - wy) * (1 - wx)
                    + src[y0, x1] * (1 - wy) * wx
                    + src[y1, x0] * wy * (1 - wx)
                    + src[y1, x1] * wy * wx
                )
                assert out[oy, ox] == pytest.approx(expected, abs=1e-12)

    def test_identity_at_same_resolution(self, rng):
        src = rng.uniform(size=(7, 5))
        assert np.array_equal(bilinear_resize(src, 7, 5), src)

    def test_transpose_symmetry(self, rng):
        src = rng.uniform(size=(6, 9))
        direct = bilinear_resize(src, 13, 4)
        via_transpose = bilinear_resize(src.T, 4, 13).T
        np.testing.assert_allclose(direct, via_transpose, atol=1e-15)

    def test_values_within_source_range(self, rng):
        src = rng.uniform(-3, 5, size=(4, 4))
        out = bilinear_resize(src, 11, 11)
        assert out.min() >= src.min() - 1e-12
        assert out.max() <= src.max() + 1e-12

    def test_zero_sized_target_rejected(self):
        with pytest.raises(InvalidArgumentError):
            bilinear_resize(np.ones((2, 2)), 0, 4)
        with pytest.raises(InvalidArgumentError):
            bilinear_resize(np.ones((0, 2)), 2, 2)


class TestGaussianBlur:
    def test_constant_image_unchanged(self):
        img = np.full((9, 9), 3.25)
        np.testing.assert_allclose(gaussian_blur(img, 2.0), img, atol=1e-12)

    def test_impulse_matches_kernel(self):
        sigma = 1.5
        img = np.zeros((31, 31))
        img[15, 15] = 1.0
        out = gaussian_blur(img, sigma)
        r = math.ceil(3 * sigma)
        direct = np.zeros_like(img)
        for dy in range(-r, r + 1):
            for dx in range(-r, r + 1):
                direct[15 + dy, 15 + dx] = math.exp(
                    -(dx * dx + dy * dy) / (2 * sigma * sigma)
                )
        direct /= direct.sum()
        np.testing.assert_allclose(out, direct, atol=1e-9)

    def test_interior_impulse_mass_preserved(self):
        img = np.zeros((41, 41))
        img[20, 20] = 2.5
        assert gaussian_blur(img, 2.0).sum() == pytest.approx(2.5, abs=1e-12)

    def test_commutes_with_constant_offset(self, rng):
        img = rng.uniform(size=(12, 12))
        lhs = gaussian_blur(img + 1.7, 1.2)
        rhs = gaussian_blur(img, 1.2) + 1.7
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_nonpositive_sigma_rejected(self):
        with pytest.raises(InvalidArgumentError):
            gaussian_blur(np.ones((3, 3)), 0.0)


class TestSoftmax:
    def test_symmetry(self):
        np.testing.assert_allclose(softmax(np.array([0.0, 0.0])), [0.5, 0.5])

    def test_no_overflow(self):
        np.testing.assert_allclose(softmax(np.array([1000.0, 1000.0])), [0.5, 0.5])

    def test_hand_case(self):
        out = softmax(np.log(np.array([1.0, 3.0])))
        np.testing.assert_allclose(out, [0.25, 0.75], atol=1e-12)

    def test_sums_to_one(self, rng):
        out = softmax(rng.normal(size=17))
        assert out.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(out > 0)

    def test_shift_invariance(self, rng):
        logits = rng.normal(size=9)
        np.testing.assert_allclose(softmax(logits), softmax(logits + 5.5), atol=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(InvalidArgumentError):
            softmax(np.array([]))


class TestDistances:
    def test_zero_for_equal(self):
        assert l2_distance([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_hand_case(self):
        assert l2_distance([1.0, 0.0], [0.0, 1.0]) == pytest.approx(math.sqrt(2))

    def test_l1_hand_case(self):
        assert l1_distance([1.0, 0.0], [0.0, 1.0]) == pytest.approx(2.0)

    def test_length_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            l2_distance([1.0], [1.0, 2.0])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_triangle_inequality(self, seed):
        r = np.random.default_rng(seed)
        a, b, c = r.normal(size=(3, 6))
        assert l2_distance(a, c) <= l2_distance(a, b) + l2_distance(b, c) + 1e-12
        assert l2_distance(a, b) == pytest.approx(l2_distance(b, a))


def test_minmax_normalize_constant_maps_to_zeros():
    assert np.all(minmax_normalize(np.full((3, 3), 4.2)) == 0.0)

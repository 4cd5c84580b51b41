import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ope_sr.basis import BasisIndex, OpeConfig, ope
from ope_sr.featuremap import FeatureMap, random_feature_map
from ope_sr.geometry import cell_center, cell_centers
from ope_sr.imageio import psnr
from ope_sr.projector import encode_image
from ope_sr.renderer import EnsembleMode, op_count, render_image, render_pixel, render_single

MODES = list(EnsembleMode)
coords = st.floats(-1.0, 1.0, allow_nan=False)


def test_render_single_examples():
    cfg = OpeConfig(2)
    e0 = np.zeros(cfg.dim)
    e0[0] = 1.0
    assert render_single(e0, 0.3, -0.7, cfg) == 1.0
    z = np.zeros(cfg.dim)
    z[BasisIndex(1, 0).flat(cfg)] = 0.8
    assert render_single(z, 0.5, 0.2, cfg) == pytest.approx(0.0, abs=1e-15)
    assert render_single(z, 0.25, 0.2, cfg) == pytest.approx(0.8 * math.sqrt(2) * math.cos(math.pi / 4))
    p = ope(0.31, -0.42, cfg)
    assert render_single(p, 0.31, -0.42, cfg) == pytest.approx(float(p @ p))
    with pytest.raises(ValueError):
        render_single(np.zeros(cfg.dim + 1), 0.0, 0.0, cfg)


@pytest.mark.parametrize("mode", MODES)
def test_constant_map_renders_constant(mode):
    fm = encode_image(np.full((12, 16, 3), 0.42), 4, 3)
    for q in [(0.0, 0.0), (-1.0, 1.0), (0.77, -0.3)]:
        np.testing.assert_allclose(render_pixel(fm, q, mode), 0.42, atol=1e-6)
    np.testing.assert_allclose(render_image(fm, 7, 31, mode), 0.42, atol=1e-6)


def test_on_center_equals_code_dc_combination():
    fm = random_feature_map(3, 4, 2, channels=2, seed=5)
    q = (cell_center(1, 3), cell_center(2, 4))
    got = render_pixel(fm, q, "full")
    want = [render_single(fm.coefficients(1, 2, c).astype(np.float64), 0.0, 0.0, fm.cfg) for c in range(2)]
    np.testing.assert_allclose(got, want, atol=1e-12)


@pytest.mark.parametrize("q", [(-1.0, -1.0), (1.0, -1.0), (-0.9, 0.95), (0.6, 1.0)])
def test_single_cell_corner_is_direct_evaluation(q):
    fm = random_feature_map(1, 1, 3, channels=3, seed=11)
    # one cell centered at 0 with h = 1: extended relative coordinate is q / 2
    want = [render_single(fm.coefficients(0, 0, c).astype(np.float64), q[0] / 2, q[1] / 2, fm.cfg) for c in range(3)]
    np.testing.assert_allclose(render_pixel(fm, q, "full"), want, atol=1e-12)


def test_single_cell_full_equals_no_interp():
    fm = random_feature_map(1, 1, 3, seed=2)
    a = render_image(fm, 9, 13, "full", clamp=False)
    b = render_image(fm, 9, 13, "no-interp", clamp=False)
    np.testing.assert_array_equal(a, b)


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3, allow_nan=False), st.sampled_from(MODES), st.integers(0, 2**32 - 1))
def test_linearity_before_clamp(alpha, mode, seed):
    fm = random_feature_map(3, 3, 2, seed=seed)
    a = render_image(fm.scaled(alpha), 10, 7, mode, clamp=False)
    b = alpha * render_image(fm, 10, 7, mode, clamp=False)
    # FeatureMap stores float32, so alpha * z is rounded once
    assert np.abs(a - b).max() < 1e-6 * max(1.0, abs(alpha)) * 10


def test_clamp_range():
    fm = random_feature_map(4, 4, 3, seed=0, scale=2.0)
    out = render_image(fm, 16, 16)
    assert out.min() >= 0.0 and out.max() <= 1.0


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 12), st.integers(1, 12), st.sampled_from(MODES))
def test_render_image_equals_render_pixel_bit_exact(h, w, H, W, mode):
    fm = random_feature_map(h, w, 2, channels=2, seed=h * 31 + w)
    img = render_image(fm, H, W, mode, clamp=False)
    xs, ys = cell_centers(H), cell_centers(W)
    for i in range(H):
        for j in range(W):
            assert np.array_equal(img[i, j], render_pixel(fm, (xs[i], ys[j]), mode))


def test_threads_do_not_change_output():
    fm = random_feature_map(16, 16, 3, seed=9)
    ref = render_image(fm, 64, 64, threads=1)
    for t in (2, 3, 8):
        assert render_image(fm, 64, 64, threads=t).tobytes() == ref.tobytes()


def test_render_errors():
    fm = random_feature_map(2, 2, 1, seed=0)
    with pytest.raises(ValueError):
        render_image(fm, 0, 4)
    with pytest.raises(ValueError):
        render_image(fm, 4, 4, threads=0)
    with pytest.raises(ValueError):
        render_pixel(fm, (1.2, 0.0))
    with pytest.raises(ValueError):
        EnsembleMode.parse("bogus")


def test_op_count_examples():
    assert op_count(3, 1, 1) == 840
    assert op_count(0, 1, 1) == 24
    assert op_count(3, 20, 7) * 2 == op_count(3, 40, 7)


def test_mode_names():
    assert [m.value for m in MODES] == ["full", "no-ext", "no-interp", "none"]
    assert EnsembleMode.parse("no-ext") is EnsembleMode.NO_EXT


def test_ablation_order_on_photo(corpus):
    name, img = corpus[0]
    fm = encode_image(img, 4, 3)
    scores = {m: psnr(render_image(fm, *img.shape[:2], m), img) for m in MODES}
    assert scores[EnsembleMode.FULL] >= max(scores.values())
    assert scores[EnsembleMode.FULL] - scores[EnsembleMode.NONE] >= 0.1

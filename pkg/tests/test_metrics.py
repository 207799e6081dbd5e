import numpy as np
import pytest

from lightlayers.image import ImageRGB, ImageScalar
from lightlayers.metrics import (
    EvalReport,
    RecordScores,
    dssim,
    evaluate_decomposition,
    l2_loss,
    nrmse,
    ssim,
    summarize,
)
from lightlayers.model import LayerSet, compose


def ssim_oracle(a, b, data_range=1.0):
    """Direct per-window SSIM evaluation with explicit loops (slow)."""
    from lightlayers.metrics import SSIM_K1, SSIM_K2, SSIM_SIGMA, SSIM_WINDOW, _gaussian_kernel

    k1 = _gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA)
    window = np.outer(k1, k1)
    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2
    h, w = a.shape
    vals = []
    for y in range(h - SSIM_WINDOW + 1):
        for x in range(w - SSIM_WINDOW + 1):
            pa = a[y : y + SSIM_WINDOW, x : x + SSIM_WINDOW]
            pb = b[y : y + SSIM_WINDOW, x : x + SSIM_WINDOW]
            mu_a = (window * pa).sum()
            mu_b = (window * pb).sum()
            var_a = (window * pa * pa).sum() - mu_a**2
            var_b = (window * pb * pb).sum() - mu_b**2
            cov = (window * pa * pb).sum() - mu_a * mu_b
            vals.append(
                ((2 * mu_a * mu_b + c1) * (2 * cov + c2))
                / ((mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2))
            )
    return float(np.mean(vals))


class TestL2:
    def test_identical_is_zero(self, rng):
        img = ImageRGB(rng.random((8, 8, 3), dtype=np.float32))
        assert l2_loss(img, img) == 0.0

    def test_unit_offset(self):
        a = ImageRGB.zeros(4, 4)
        b = ImageRGB.constant(4, 4, (1, 1, 1))
        assert l2_loss(a, b) == 1.0

    def test_matches_loop_oracle(self, rng):
        a = rng.random((5, 7, 3))
        b = rng.random((5, 7, 3))
        total = 0.0
        for y in range(5):
            for x in range(7):
                for c in range(3):
                    total += (a[y, x, c] - b[y, x, c]) ** 2
        assert l2_loss(a, b) == pytest.approx(total / (5 * 7 * 3), abs=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            l2_loss(np.zeros((2, 2)), np.zeros((3, 3)))


class TestNRMSE:
    def test_identical_is_zero(self, rng):
        ref = rng.random((6, 6, 3))
        assert nrmse(ref, ref) == 0.0

    def test_double_is_one(self, rng):
        ref = rng.random((6, 6, 3)) + 0.1
        assert nrmse(2.0 * ref, ref) == pytest.approx(1.0, abs=1e-9)

    def test_scale_covariance(self, rng):
        ref = rng.random((6, 6, 3)) + 0.1
        for k in (0.5, 1.5, 3.0):
            assert nrmse(k * ref, ref) == pytest.approx(abs(k - 1.0), abs=1e-9)

    def test_matches_direct_formula(self, rng):
        pred = rng.random((4, 5, 3))
        ref = rng.random((4, 5, 3)) + 0.1
        direct = np.sqrt(((pred - ref) ** 2).sum()) / np.sqrt((ref**2).sum())
        assert nrmse(pred, ref) == pytest.approx(direct, abs=1e-12)

    def test_minmax_mode(self, rng):
        pred = rng.random((4, 4))
        ref = rng.random((4, 4))
        expected = np.sqrt(np.mean((pred - ref) ** 2)) / (ref.max() - ref.min())
        assert nrmse(pred, ref, mode="minmax") == pytest.approx(expected, abs=1e-12)

    def test_zero_reference_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            nrmse(np.ones((3, 3)), np.zeros((3, 3)))

    def test_unknown_mode(self):
        with pytest.raises(ValueError, match="mode"):
            nrmse(np.ones((3, 3)), np.ones((3, 3)), mode="other")


class TestDSSIM:
    def test_identical_is_zero(self, rng):
        img = rng.random((16, 16, 3))
        assert dssim(img, img) == 0.0

    def test_symmetry_bitwise(self, rng):
        a = rng.random((20, 20, 3))
        b = rng.random((20, 20, 3))
        assert abs(dssim(a, b) - dssim(b, a)) < 1e-12

    def test_anticorrelated_structure_approaches_one(self, rng):
        a = (rng.random((32, 32)) > 0.5).astype(np.float64)
        value = dssim(a, 1.0 - a)
        assert value > 0.8

    def test_matches_direct_oracle(self, rng):
        a = rng.random((14, 15))
        b = np.clip(a + rng.normal(0, 0.1, a.shape), 0, 1)
        assert ssim(a, b) == pytest.approx(ssim_oracle(a, b), abs=1e-9)

    def test_window_size_enforced(self, rng):
        small = rng.random((8, 8))
        with pytest.raises(ValueError, match="11"):
            ssim(small, small)

    def test_in_unit_interval(self, rng):
        a = rng.random((16, 16, 3))
        b = rng.random((16, 16, 3))
        assert 0.0 <= dssim(a, b) <= 1.0


def make_layers(rng, w=16, h=16):
    return LayerSet(
        occlusion=ImageScalar(rng.uniform(0.05, 1.0, (h, w)).astype(np.float32)),
        irradiance=ImageRGB(rng.uniform(0.0, 1.5, (h, w, 3)).astype(np.float32)),
        albedo=ImageRGB(rng.uniform(0.0, 1.0, (h, w, 3)).astype(np.float32)),
        specular=ImageRGB(rng.uniform(0.0, 0.5, (h, w, 3)).astype(np.float32)),
    )


class TestEvaluateDecomposition:
    def test_identity_is_all_zeros(self, rng):
        gt = make_layers(rng)
        scores = evaluate_decomposition(gt, gt, compose(gt))
        assert all(v == 0.0 for v in scores.layer_l2.values())
        assert scores.recombination == (0.0, 0.0, 0.0)
        assert scores.dssim_albedo == 0.0
        assert scores.nrmse_albedo == 0.0

    def test_albedo_perturbation_hits_albedo_terms_only(self, rng):
        gt = make_layers(rng)
        pred = LayerSet(
            occlusion=gt.occlusion,
            irradiance=gt.irradiance,
            albedo=ImageRGB(np.roll(gt.albedo.data, 1, axis=2)),  # hue rotation
            specular=gt.specular,
        )
        scores = evaluate_decomposition(pred, gt, compose(gt))
        assert scores.layer_l2["albedo"] > 0.0
        for name in ("occlusion", "irradiance", "specular"):
            assert scores.layer_l2[name] == 0.0
        assert scores.dssim_albedo > 0.0

    def test_dimension_mismatch(self, rng):
        gt = make_layers(rng)
        pred = make_layers(rng, w=8, h=8)
        with pytest.raises(ValueError):
            evaluate_decomposition(pred, gt, compose(gt))


class TestSummarize:
    def test_identity_batch_is_zero_pm_zero(self, rng):
        gt = make_layers(rng)
        scores = [evaluate_decomposition(gt, gt, compose(gt)) for _ in range(5)]
        report = summarize(scores)
        assert report.count == 5
        assert report.dssim_mean == 0.0 and report.dssim_std == 0.0
        assert report.nrmse_mean == 0.0 and report.nrmse_std == 0.0
        assert all(v == 0.0 for v in report.layer_l2_mean.values())

    def test_report_format_roundtrip_keys(self, rng):
        gt = make_layers(rng)
        report = summarize([evaluate_decomposition(gt, gt, compose(gt))])
        text = report.format()
        assert "dssim.albedo.mean=0" in text
        assert "l2.occlusion.mean=0" in text
        assert text.startswith("# lightlayers evaluation report")

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            summarize([])

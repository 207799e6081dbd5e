import numpy as np
import pytest

from lightlayers.basis import (
    EnvironmentMap,
    latlong_directions,
    project_sh9,
    eval_irradiance_sh,
    split_envmap,
)
from lightlayers.envgen import smooth_envmap
from lightlayers.image import ImageRGB
from lightlayers.prefilter import (
    PrefilteredMap,
    brute_irradiance,
    glossy_prefilter,
    glossy_prefilter_split,
    irradiance_map,
)


def phong_lobe_mc(env, axis, exponent, n_samples, seed):
    """Monte-Carlo oracle for the normalized Phong lobe.

    Sampling directions proportionally to max(cos a, 0)**exponent around
    the axis makes the normalized lobe integral the plain average of the
    sampled radiances.
    """
    rng = np.random.default_rng(seed)
    u1 = rng.random(n_samples)
    u2 = rng.random(n_samples)
    cos_a = u1 ** (1.0 / (exponent + 1.0))
    sin_a = np.sqrt(np.maximum(1.0 - cos_a**2, 0.0))
    phi = 2.0 * np.pi * u2
    local = np.stack([sin_a * np.cos(phi), sin_a * np.sin(phi), cos_a], axis=1)
    helper = np.array([1.0, 0.0, 0.0]) if abs(axis[0]) < 0.6 else np.array([0.0, 1.0, 0.0])
    t = np.cross(helper, axis)
    t /= np.linalg.norm(t)
    b = np.cross(axis, t)
    world = local[:, 0:1] * t + local[:, 1:2] * b + local[:, 2:3] * axis
    return env.sample_bilinear(world).mean(axis=0)


class TestIrradianceMap:
    def test_constant_env_is_fixed_point(self):
        env = EnvironmentMap(ImageRGB.constant(512, 256, (0.6, 0.4, 0.2)))
        pre = irradiance_map(env)
        np.testing.assert_allclose(
            pre.map.data, np.tile([0.6, 0.4, 0.2], (32, 64, 1)), rtol=0, atol=1e-3
        )

    def test_matches_direct_sh_eval_at_any_resolution(self):
        env = smooth_envmap(4)
        sh = project_sh9(env)
        for w, h in ((64, 32), (128, 64)):
            pre = irradiance_map(env, w, h)
            direct = np.maximum(eval_irradiance_sh(sh, latlong_directions(w, h)), 0.0)
            np.testing.assert_allclose(pre.map.data, direct, rtol=0, atol=1e-6)

    def test_top_delta_env_decreases_from_pole(self):
        data = np.zeros((256, 512, 3), np.float32)
        data[0, :] = 50.0
        env = EnvironmentMap(ImageRGB(data))
        pre = irradiance_map(env)
        col = pre.map.data[:, 0, 0]
        assert col[0] > col[len(col) // 2] > col[-1]
        brute_up = brute_irradiance(env, np.array([0.0, 1.0, 0.0]))
        assert pre.map.data[0, :, 0].mean() == pytest.approx(brute_up[0], rel=0.1)


class TestGlossyPrefilter:
    def test_constant_fixed_point_over_exponents(self):
        env = EnvironmentMap(ImageRGB.constant(512, 256, (0.4, 0.4, 0.4)))
        for n in (3.0, 300.0, 59049.0):
            pre = glossy_prefilter(env, n, 32, 16)
            np.testing.assert_allclose(
                pre.map.data, np.float32(0.4), rtol=0, atol=1e-6
            )

    def test_exponent_validated(self):
        env = EnvironmentMap(ImageRGB.constant(8, 4, (1.0, 1.0, 1.0)))
        with pytest.raises(ValueError):
            glossy_prefilter(env, 0.5)
        with pytest.raises(ValueError):
            PrefilteredMap(map=env, kind="glossy", exponent=None)

    def test_output_bounded_by_input_range(self):
        env = smooth_envmap(6)
        pre = glossy_prefilter(env, 7.5, 16, 8)
        for ch in range(3):
            assert pre.map.data[..., ch].min() >= env.data[..., ch].min() - 1e-6
            assert pre.map.data[..., ch].max() <= env.data[..., ch].max() + 1e-6

    def test_high_exponent_approaches_direct_lookup(self):
        env = smooth_envmap(7)
        dirs = latlong_directions(32, 16).reshape(-1, 3)
        lookup = env.sample_bilinear(dirs)
        errors = []
        for n in (3.0, 30.0, 300.0, 3000.0):
            pre = glossy_prefilter(env, n, 32, 16)
            err = np.abs(pre.map.data.reshape(-1, 3).astype(np.float64) - lookup).mean()
            errors.append(err)
        assert all(a > b for a, b in zip(errors, errors[1:]))

    def test_low_exponent_matches_mc_oracle(self):
        env = smooth_envmap(8)
        pre = glossy_prefilter(env, 3.0)
        dirs = latlong_directions(64, 32)
        values = pre.map.data.astype(np.float64)
        rng = np.random.default_rng(0)
        for _ in range(8):
            r = rng.integers(0, 32)
            c = rng.integers(0, 64)
            mc = phong_lobe_mc(env, dirs[r, c], 3.0, 100_000, seed=r * 64 + c)
            rel = np.linalg.norm(values[r, c] - mc) / np.linalg.norm(mc)
            assert rel < 0.01

    def test_peak_sharpens_monotonically(self):
        data = np.full((64, 128, 3), 0.01, np.float32)
        data[8, 40] = 30.0
        env = EnvironmentMap(ImageRGB(data))
        peaks = [
            glossy_prefilter(env, n, 32, 16).map.data.max()
            for n in (2.0, 8.0, 32.0, 128.0, 512.0)
        ]
        assert all(a <= b + 1e-9 for a, b in zip(peaks, peaks[1:]))


class TestGlossySplit:
    def test_splits_sum_to_total(self):
        env = smooth_envmap(9)
        total, splits = glossy_prefilter_split(env, 20.0, 5.0, 16, 8)
        summed = sum(s.map.data.astype(np.float64) for s in splits)
        np.testing.assert_allclose(summed, total.map.data, rtol=1e-5, atol=1e-6)

    def test_matches_separate_split_prefilters(self):
        env = smooth_envmap(10)
        _, splits = glossy_prefilter_split(env, 20.0, 4.0, 8, 4)
        parts = split_envmap(env)
        for part_env, joint in zip(parts, splits):
            separate = glossy_prefilter(part_env, 4.0, 8, 4)
            np.testing.assert_allclose(
                joint.map.data, separate.map.data, rtol=1e-4, atol=1e-6
            )


class TestBruteIrradiance:
    def test_constant_env(self):
        env = EnvironmentMap(ImageRGB.constant(512, 256, (0.8, 0.8, 0.8)))
        e = brute_irradiance(env, np.array([0.0, 1.0, 0.0]))
        np.testing.assert_allclose(e, 0.8, rtol=0, atol=1e-3)

    def test_below_horizon_radiance_ignored(self):
        # Radiance only below the horizon of +y: clamped cosine kills it.
        data = np.zeros((128, 256, 3), np.float32)
        data[96:, :] = 5.0  # theta > 3pi/4, i.e. cos(theta) < -0.7
        env = EnvironmentMap(ImageRGB(data))
        e = brute_irradiance(env, np.array([0.0, 1.0, 0.0]))
        np.testing.assert_array_equal(e, 0.0)

    def test_sh_agrees_on_smooth_maps(self, rng):
        env = smooth_envmap(11)
        n = rng.normal(size=(64, 3))
        n /= np.linalg.norm(n, axis=1, keepdims=True)
        sh_e = eval_irradiance_sh(project_sh9(env), n)
        brute = brute_irradiance(env, n)
        rel = np.linalg.norm(sh_e - brute) / np.linalg.norm(brute)
        assert rel < 0.05

# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

import math

import numpy as np
import pytest

from src.codec import CodecConfig, encode_image
from src.eval import (
    TEXTURE_KINDS,
    EmptyTrainingSetError,
    GmrfModel,
    InsufficientPointsError,
    RdPoint,
    UndefinedSpectrumError,
    bd_rate,
    bd_rate_by_uniformity,
    column_angles,
    generate_texture_suite,
    glnu,
    learn_klt,
    learn_nonseparable_path_gbt,
    nonuniform_path_model,
    per_image_bd_rate,
    pse,
    pse_batch,
    psnr,
    run_pse_experiment,
    sample_gmrf,
    ssim,
    uniform_path_model,
)
from src.transforms import (
    DEFAULT_ALPHA,
    AsymmetricMatrixError,
    DimensionMismatchError,
    InvalidParameterError,
    dct_basis,
    weights_from_msd,
)

QPS = (23, 27, 31, 35, 39)


def curve(rates, psnrs):
    return [RdPoint(rate=r, psnr=p) for r, p in zip(rates, psnrs)]


ANCHOR_RATES = [0.4, 0.7, 1.1, 1.8, 2.6]
ANCHOR_PSNRS = [30.0, 33.0, 36.0, 39.0, 42.0]


class TestPse:
    def test_single_nonzero_coefficient(self):
        assert pse(np.array([0.0, 3.0, 0.0, 0.0])) == 0.0

    def test_flat_spectrum(self):
        assert pse(np.full(8, -2.5)) == pytest.approx(math.log(8))

    def test_two_equal_coefficients(self):
        assert pse(np.array([1.0, 0.0, -1.0, 0.0])) == pytest.approx(math.log(2))

    def test_all_zero_is_undefined(self):
        with pytest.raises(UndefinedSpectrumError):
            pse(np.zeros(8))
        with pytest.raises(UndefinedSpectrumError):
            pse_batch(np.zeros((2, 8)))

    def test_batch_matches_single(self, rng):
        coeffs = rng.normal(size=(50, 8))
        coeffs[0, 1:] = 0.0
        values = pse_batch(coeffs)
        np.testing.assert_allclose(values, [pse(row) for row in coeffs], atol=1e-12)
        assert np.all(values >= 0.0) and np.all(values <= math.log(8))


class TestGmrfModel:
    def test_uniform_model_precision(self):
        model = uniform_path_model(4)
        np.testing.assert_array_equal(np.diag(model.P), [1, 2, 2, 1])
        assert model.scales[0] == 0.0

    def test_nonuniform_model_weights(self):
        model = nonuniform_path_model(8)
        np.testing.assert_allclose(-np.diag(model.P, k=1), np.linspace(0.1, 1.0, 7))

    def test_covariance_is_pseudo_inverse(self):
        model = nonuniform_path_model(8)
        np.testing.assert_allclose(model.covariance, np.linalg.pinv(model.P), atol=1e-9)

    def test_from_precision(self):
        model = GmrfModel.from_precision(uniform_path_model(6).P)
        np.testing.assert_allclose(model.covariance, uniform_path_model(6).covariance, atol=1e-9)

    def test_rejects_asymmetric_precision(self):
        with pytest.raises(AsymmetricMatrixError):
            GmrfModel.from_precision(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_rejects_indefinite_precision(self):
        with pytest.raises(InvalidParameterError):
            GmrfModel.from_precision(np.array([[1.0, 2.0], [2.0, 1.0]]))


class TestSampling:
    def test_samples_have_zero_dc(self):
        samples = sample_gmrf(nonuniform_path_model(), 200, seed=3)
        assert samples.shape == (200, 8)
        np.testing.assert_allclose(samples.mean(axis=1), 0.0, atol=1e-9)

    def test_seeded_samples_repeat(self):
        first = sample_gmrf(uniform_path_model(), 10, seed=11)
        second = sample_gmrf(uniform_path_model(), 10, seed=11)
        assert first.tobytes() == second.tobytes()
        assert not np.array_equal(first, sample_gmrf(uniform_path_model(), 10, seed=12))

    def test_zero_samples(self):
        assert sample_gmrf(uniform_path_model(), 0, seed=1).shape == (0, 8)

    def test_negative_count(self):
        with pytest.raises(InvalidParameterError):
            sample_gmrf(uniform_path_model(), -1)

    @pytest.mark.slow
    def test_empirical_covariance(self):
        model = uniform_path_model()
        samples = sample_gmrf(model, 100_000, seed=5)
        empirical = samples.T @ samples / samples.shape[0]
        error = np.linalg.norm(empirical - model.covariance) / np.linalg.norm(model.covariance)
        assert error < 0.05

    @pytest.mark.slow
    def test_matched_gbt_decorrelates(self):
        model = nonuniform_path_model()
        coeffs = sample_gmrf(model, 100_000, seed=6) @ model.U
        cov = coeffs.T @ coeffs / coeffs.shape[0]
        off = cov - np.diag(np.diag(cov))
        assert np.abs(off).max() < 0.05 * np.diag(cov).max()


class TestLearnedBases:
    def test_constant_training_gives_dct(self):
        train = np.tile(np.arange(5, dtype=np.float64)[:, None], (1, 8))
        basis = learn_nonseparable_path_gbt(train)
        np.testing.assert_allclose(basis.U, dct_basis(8).U, atol=1e-10)
        np.testing.assert_allclose(basis.eigenvalues[1], (2.0 - 2.0 * math.cos(math.pi / 8)) / (2 * DEFAULT_ALPHA))

    def test_two_point_weight(self):
        alpha = 0.25
        basis = learn_nonseparable_path_gbt(np.array([[0.0, 1.0], [0.0, 1.0]]), alpha)
        # L = w [[1, -1], [-1, 1]] has eigenvalues 0 and 2w
        np.testing.assert_allclose(basis.eigenvalues, [0.0, 2.0 / (1.0 + 2.0 * alpha)], atol=1e-12)

    def test_learned_weights_match_uniform_model(self):
        train = sample_gmrf(uniform_path_model(), 100_000, seed=21)
        msd = np.mean((train[:, :-1] - train[:, 1:]) ** 2, axis=0)
        # unit edges: each neighbour difference has unit variance
        np.testing.assert_allclose(weights_from_msd(msd).w, 1.0 / (1.0 + 2.0 * DEFAULT_ALPHA), rtol=0.03)

    def test_gbt_approaches_dct_with_more_samples(self):
        dct = dct_basis(8)

        def mean_angle(count):
            return np.mean([
                column_angles(learn_nonseparable_path_gbt(
                    sample_gmrf(uniform_path_model(), count, seed=seed)).U, dct.U).max()
                for seed in range(5)
            ])

        small, large = mean_angle(10_000), mean_angle(100_000)
        assert large < small
        assert large < 3e-2

    def test_klt_of_single_sample(self):
        x = np.array([1.0, 2.0, 3.0])
        basis = learn_klt(x)
        np.testing.assert_allclose(basis.U[:, 0], x / np.linalg.norm(x), atol=1e-12)

    def test_klt_of_standard_basis(self):
        train = np.vstack([np.eye(4), np.eye(4)])
        np.testing.assert_allclose(learn_klt(train).U, np.eye(4), atol=1e-12)

    def test_klt_converges_to_dct(self):
        train = sample_gmrf(uniform_path_model(), 10_000, seed=22)
        angles = column_angles(learn_klt(train).U[:, :3], dct_basis(8).U[:, 1:4])
        assert angles.max() < 1e-1

    @pytest.mark.parametrize("learner", [learn_klt, learn_nonseparable_path_gbt])
    def test_empty_training_set(self, learner):
        with pytest.raises(EmptyTrainingSetError):
            learner(np.zeros((0, 8)))

    def test_column_angles(self):
        U = dct_basis(4).U
        np.testing.assert_allclose(column_angles(U, -U), 0.0, atol=1e-7)
        np.testing.assert_allclose(column_angles(U[:, :1], U[:, 1:2]), math.pi / 2)


class TestPseExperiment:
    def test_reduced_run(self):
        results = run_pse_experiment(uniform_path_model(), [2, 4, 8], n_test=200, trials=3, seed=1)
        assert [r.training_size for r in results] == [2, 4, 8]
        assert len({r.dct for r in results}) == 1
        for r in results:
            for value in r.mean_pse.values():
                assert 0.0 <= value <= math.log(8)

    def test_seed_repeatability(self):
        first = run_pse_experiment(nonuniform_path_model(), [4, 16], n_test=100, trials=2, seed=9)
        second = run_pse_experiment(nonuniform_path_model(), [4, 16], n_test=100, trials=2, seed=9)
        other = run_pse_experiment(nonuniform_path_model(), [4, 16], n_test=100, trials=2, seed=10)
        assert [r.as_row() for r in first] == [r.as_row() for r in second]
        assert [r.as_row() for r in first] != [r.as_row() for r in other]

    @pytest.mark.parametrize("kwargs", [
        {'training_sizes': []},
        {'training_sizes': [0, 4]},
        {'trials': 0},
        {'n_test': 0},
    ])
    def test_invalid_arguments(self, kwargs):
        params = {'training_sizes': [4], 'trials': 1, 'n_test': 10, 'seed': 0}
        params.update(kwargs)
        with pytest.raises(InvalidParameterError):
            run_pse_experiment(uniform_path_model(), **params)

    @pytest.mark.slow
    def test_uniform_model_trend(self):
        sizes = [2, 4, 8, 16, 32, 10_000]
        results = run_pse_experiment(uniform_path_model(), sizes, trials=20, seed=0)
        for r in results[:-1]:
            assert r.gbt <= r.klt
        final = results[-1]
        assert abs(final.gbt - final.dct) <= 0.02 * final.dct
        assert abs(final.klt - final.dct) <= 0.02 * final.dct

    @pytest.mark.slow
    def test_nonuniform_model_beats_dct(self):
        final = run_pse_experiment(nonuniform_path_model(), [10_000], trials=20, seed=0)[0]
        assert final.gbt < 0.99 * final.dct
        assert final.klt < 0.99 * final.dct


class TestPsnrSsim:
    def test_psnr_of_unit_mse(self):
        a = np.full((8, 8), 100, dtype=np.uint8)
        b = a.copy()
        b[::2] += 1
        b[1::2] -= 1
        assert psnr(a, b) == pytest.approx(48.1308, abs=1e-4)

    def test_psnr_extremes(self):
        black = np.zeros((4, 4), dtype=np.uint8)
        assert psnr(black, np.full((4, 4), 255, dtype=np.uint8)) == pytest.approx(0.0)
        assert psnr(black, black) == math.inf

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            psnr(np.zeros((4, 4)), np.zeros((4, 5)))

    def test_ssim_identical(self, small_image):
        assert ssim(small_image, small_image) == pytest.approx(1.0)

    def test_ssim_of_shifted_image(self, small_image):
        shifted = np.clip(small_image.astype(np.int64) + 64, 0, 255)
        assert ssim(small_image, shifted) < 1.0

    def test_ssim_of_independent_noise(self, rng):
        a = rng.integers(0, 256, (320, 320))
        b = rng.integers(0, 256, (320, 320))
        assert abs(ssim(a, b)) < 0.1


class TestBdRate:
    def test_self_comparison(self):
        anchor = curve(ANCHOR_RATES, ANCHOR_PSNRS)
        assert bd_rate(anchor, anchor) == pytest.approx(0.0, abs=1e-9)

    def test_uniform_rate_saving(self):
        anchor = curve(ANCHOR_RATES, ANCHOR_PSNRS)
        test = curve([0.9 * r for r in ANCHOR_RATES], ANCHOR_PSNRS)
        assert bd_rate(anchor, test) == pytest.approx(-10.0, abs=0.01)

    def test_needs_four_points(self):
        anchor = curve(ANCHOR_RATES[:3], ANCHOR_PSNRS[:3])
        with pytest.raises(InsufficientPointsError):
            bd_rate(anchor, anchor)

    def test_drops_infinite_psnr(self):
        anchor = curve(ANCHOR_RATES + [3.5], ANCHOR_PSNRS + [math.inf])
        assert bd_rate(anchor, anchor) == pytest.approx(0.0, abs=1e-9)

    def test_disjoint_quality_ranges(self):
        anchor = curve(ANCHOR_RATES, ANCHOR_PSNRS)
        test = curve(ANCHOR_RATES, [p + 20.0 for p in ANCHOR_PSNRS])
        assert math.isnan(bd_rate(anchor, test))

    def test_rd_point_validation(self):
        with pytest.raises(InvalidParameterError):
            RdPoint(rate=0.0, psnr=30.0)
        with pytest.raises(InvalidParameterError):
            RdPoint(rate=1.0, psnr=30.0, ssim=1.5)

    def test_per_image_skips_unmatched(self):
        anchor = {'a': curve(ANCHOR_RATES, ANCHOR_PSNRS), 'b': curve(ANCHOR_RATES, ANCHOR_PSNRS)}
        test = {'a': curve(ANCHOR_RATES, ANCHOR_PSNRS)}
        assert list(per_image_bd_rate(anchor, test)) == ['a']

    def test_split_by_uniformity(self):
        factors = {'a': 0.9, 'b': 0.8, 'c': 1.0, 'd': 1.1}
        anchor = {name: curve(ANCHOR_RATES, ANCHOR_PSNRS) for name in factors}
        test = {name: curve([f * r for r in ANCHOR_RATES], ANCHOR_PSNRS) for name, f in factors.items()}
        split = bd_rate_by_uniformity(anchor, test, {'a': 1.0, 'b': 2.0, 'c': 3.0, 'd': 4.0})
        assert split['uniform'] == pytest.approx(-15.0, abs=0.01)
        assert split['non_uniform'] == pytest.approx(5.0, abs=0.01)
        assert split['all'] == pytest.approx(-5.0, abs=0.01)

    def test_split_without_glnu(self):
        anchor = {'a': curve(ANCHOR_RATES, ANCHOR_PSNRS)}
        split = bd_rate_by_uniformity(anchor, anchor, {})
        assert math.isnan(split['uniform']) and math.isnan(split['non_uniform'])
        assert split['all'] == pytest.approx(0.0, abs=1e-9)


class TestGlnu:
    def test_constant_image(self):
        assert glnu(np.full((4, 4), 90, dtype=np.uint8)) == pytest.approx(4.0)

    def test_alternating_levels(self):
        image = np.tile(np.array([0, 255, 0, 255], dtype=np.uint8), (4, 1))
        assert glnu(image) == pytest.approx(8.0)
        # every column is a single run
        assert glnu(image, direction='vertical') == pytest.approx(2.0)

    def test_checkerboard_exceeds_constant(self):
        checker = (np.indices((16, 16)).sum(axis=0) % 2 * 255).astype(np.uint8)
        constant = np.full((16, 16), 128, dtype=np.uint8)
        assert glnu(checker) > glnu(constant)

    def test_invalid_arguments(self):
        with pytest.raises(InvalidParameterError):
            glnu(np.zeros((4, 4)), direction='diagonal')
        with pytest.raises(InvalidParameterError):
            glnu(np.zeros((4, 4)), levels=0)
        with pytest.raises(DimensionMismatchError):
            glnu(np.zeros(4))


class TestTextures:
    def test_suite_shape_and_names(self):
        suite = generate_texture_suite(size=32, count=8, seed=4)
        assert len(suite) == 8
        kinds = list(TEXTURE_KINDS)
        for index, (name, image) in enumerate(suite):
            assert name == f"texture_{index:02d}_{kinds[index % len(kinds)]}"
            assert image.shape == (32, 32) and image.dtype == np.uint8

    def test_seeded(self):
        first = generate_texture_suite(size=32, count=3, seed=4)
        second = generate_texture_suite(size=32, count=3, seed=4)
        other = generate_texture_suite(size=32, count=3, seed=5)
        assert all(np.array_equal(a, b) for (_, a), (_, b) in zip(first, second))
        assert not all(np.array_equal(a, b) for (_, a), (_, b) in zip(first, other))

    def test_textures_are_not_flat(self):
        for _, image in generate_texture_suite(size=64, count=6, seed=0):
            assert image.std() > 10.0

    def test_invalid_size(self):
        with pytest.raises(InvalidParameterError):
            generate_texture_suite(size=0)

    @pytest.mark.slow
    def test_learned_transforms_save_rate(self):
        anchor, test, uniformity = {}, {}, {}
        for name, image in generate_texture_suite(size=320, count=10, seed=0):
            anchor[name], test[name] = [], []
            uniformity[name] = glnu(image)
            for qp in QPS:
                for scenario, curves in (('dct', anchor), ('dct+gbt', test)):
                    config = CodecConfig(width=320, height=320, qp=qp, transforms=scenario)
                    result = encode_image(image, config)
                    assert all(b.cost_chosen <= b.cost_dct for b in result.blocks)
                    curves[name].append(RdPoint(result.rate_bpp, psnr(image, result.reconstruction)))
        assert bd_rate_by_uniformity(anchor, test, uniformity)['all'] < 0.0

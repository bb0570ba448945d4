"""Curve-fitting engine: recovery, determinism, weights, degeneracies."""

import numpy as np
import pytest

from abgsem import (
    AbgParams,
    BitScalingParams,
    FitOptions,
    InsufficientSamplesError,
    MetricSample,
    NonFiniteSampleError,
    eval_abg,
    eval_upper_bound,
    fit_abg,
    fit_upper_bound,
    sse,
)
from abgsem.fitting import _family, _jacobian_log
from abgsem.model import POSITIVITY_FLOOR

CNN_RECON = AbgParams(alpha=0.92, beta=7.28, gamma=2.08, tau=0.97)
CNN_BITS = BitScalingParams(c1=0.96, c2=0.89, c3=0.01, c4=0.75)


def snr_samples(params, xs, noise=0.0, rng=None, weight=1.0):
    ys = eval_abg(params, np.asarray(xs, dtype=float))
    if noise > 0.0:
        ys = ys + rng.normal(0.0, noise, size=len(xs))
    return [MetricSample(float(x), float(y), weight) for x, y in zip(xs, ys)]


def rel_err(fitted, truth):
    pairs = zip((fitted.alpha, fitted.beta, fitted.gamma, fitted.tau),
                (truth.alpha, truth.beta, truth.gamma, truth.tau))
    return max(abs(a - b) / abs(b) for a, b in pairs)


GRID = np.geomspace(1e-2, 1e2, 40)


class TestRecovery:
    def test_noiseless_snr_curve(self):
        result = fit_abg(snr_samples(CNN_RECON, GRID), FitOptions(seed=0))
        assert result.converged and not result.degenerate
        assert rel_err(result.params, CNN_RECON) < 1e-6
        assert result.sse < 1e-12
        assert result.validity_range == (1e-2, 1e2)

    def test_noiseless_bit_curve(self):
        xs = np.geomspace(1.0, 4096.0, 40)
        ys = eval_upper_bound(CNN_BITS, xs)
        samples = [MetricSample(float(x), float(y)) for x, y in zip(xs, ys)]
        result = fit_upper_bound(samples, FitOptions(seed=0))
        truth = (CNN_BITS.c1, CNN_BITS.c2, CNN_BITS.c3, CNN_BITS.c4)
        got = (result.params.c1, result.params.c2, result.params.c3, result.params.c4)
        assert max(abs(a - b) / b for a, b in zip(got, truth)) < 1e-6
        assert result.sse < 1e-12

    def test_noisy_fit_beats_generating_params(self):
        rng = np.random.default_rng(11)
        samples = snr_samples(CNN_RECON, GRID, noise=0.005, rng=rng)
        result = fit_abg(samples, FitOptions(seed=0))
        # Least squares must do at least as well as the curve the noise
        # was added around.
        assert result.sse <= sse(CNN_RECON, samples) + 1e-15
        assert rel_err(result.params, CNN_RECON) < 0.05

    def test_seed_insensitive_on_clean_data(self):
        a = fit_abg(snr_samples(CNN_RECON, GRID), FitOptions(seed=0)).params
        b = fit_abg(snr_samples(CNN_RECON, GRID), FitOptions(seed=99)).params
        assert abs(a.alpha - b.alpha) / CNN_RECON.alpha < 1e-6
        assert abs(a.beta - b.beta) / CNN_RECON.beta < 1e-6
        assert abs(a.gamma - b.gamma) / CNN_RECON.gamma < 1e-6
        assert abs(a.tau - b.tau) / CNN_RECON.tau < 1e-6


class TestDeterminism:
    def test_bitwise_repeatable(self):
        samples = snr_samples(CNN_RECON, GRID)
        a = fit_abg(samples, FitOptions(seed=3))
        b = fit_abg(samples, FitOptions(seed=3))
        assert (a.params.alpha, a.params.beta, a.params.gamma, a.params.tau) == \
               (b.params.alpha, b.params.beta, b.params.gamma, b.params.tau)
        assert a.sse == b.sse and a.iterations == b.iterations


class TestWeights:
    def test_doubled_weight_matches_duplication(self):
        rng = np.random.default_rng(5)
        noisy = snr_samples(CNN_RECON, GRID, noise=0.01, rng=rng)
        doubled = [MetricSample(s.x, s.y, 2.0) for s in noisy]
        duplicated = noisy + noisy
        a = fit_abg(doubled, FitOptions(seed=0)).params
        b = fit_abg(duplicated, FitOptions(seed=0)).params
        assert abs(a.alpha - b.alpha) < 1e-8
        assert abs(a.beta - b.beta) < 1e-8
        assert abs(a.gamma - b.gamma) < 1e-8
        assert abs(a.tau - b.tau) < 1e-8

    def test_zero_weight_point_ignored(self):
        clean = snr_samples(CNN_RECON, GRID)
        spiked = clean + [MetricSample(1.0, 50.0, 0.0)]
        result = fit_abg(spiked, FitOptions(seed=0))
        assert rel_err(result.params, CNN_RECON) < 1e-6


class TestScaleCovariance:
    def test_rescaled_abscissa_rescales_beta(self):
        k = 37.0
        base = fit_abg(snr_samples(CNN_RECON, GRID), FitOptions(seed=0)).params
        scaled_samples = [MetricSample(s.x * k, s.y) for s in snr_samples(CNN_RECON, GRID)]
        scaled = fit_abg(scaled_samples, FitOptions(seed=0)).params
        assert abs(scaled.beta * k - base.beta) / base.beta < 1e-5
        assert abs(scaled.alpha - base.alpha) / base.alpha < 1e-6
        assert abs(scaled.tau - base.tau) / base.tau < 1e-5


class TestDegenerate:
    def test_flat_data_short_circuit(self):
        samples = [MetricSample(float(x), 0.75) for x in (0.1, 1.0, 10.0, 100.0, 1000.0)]
        result = fit_abg(samples, FitOptions(seed=0))
        assert result.degenerate and result.converged
        assert result.iterations == 0
        assert result.params.alpha == pytest.approx(0.75, abs=1e-10)
        assert result.params.gamma == POSITIVITY_FLOOR

    def test_flat_weighted_mean(self):
        samples = [MetricSample(1.0, 0.2, 3.0), MetricSample(2.0, 0.2, 3.0),
                   MetricSample(3.0, 0.2 + 5e-7, 1.0), MetricSample(4.0, 0.2, 1.0),
                   MetricSample(5.0, 0.2, 1.0)]
        result = fit_abg(samples, FitOptions(seed=0))
        weights = np.array([3.0, 3.0, 1.0, 1.0, 1.0])
        ys = np.array([0.2, 0.2, 0.2 + 5e-7, 0.2, 0.2])
        assert result.degenerate
        assert result.params.alpha == pytest.approx(float(weights @ ys / weights.sum()),
                                                    rel=1e-12)


class TestBounds:
    def test_tau_box_respected(self):
        truth = AbgParams(alpha=0.9, beta=1.0, gamma=1.5, tau=2.0)
        bounds = ((POSITIVITY_FLOOR, np.inf), (POSITIVITY_FLOOR, np.inf),
                  (POSITIVITY_FLOOR, np.inf), (0.5, 1.2))
        result = fit_abg(snr_samples(truth, GRID), FitOptions(seed=0, bounds=bounds))
        assert 0.5 - 1e-9 <= result.params.tau <= 1.2 + 1e-9


class TestInputErrors:
    def test_too_few_samples(self):
        samples = snr_samples(CNN_RECON, np.geomspace(0.1, 10.0, 4))
        with pytest.raises(InsufficientSamplesError):
            fit_abg(samples)

    def test_too_few_distinct_abscissae(self):
        samples = [MetricSample(1.0, 0.1), MetricSample(1.0, 0.2),
                   MetricSample(2.0, 0.3), MetricSample(2.0, 0.4),
                   MetricSample(2.0, 0.5)]
        with pytest.raises(InsufficientSamplesError):
            fit_abg(samples)

    def test_non_finite_rejected(self):
        base = snr_samples(CNN_RECON, GRID)
        with pytest.raises(NonFiniteSampleError):
            fit_abg(base + [MetricSample(1.0, float("nan"))])
        with pytest.raises(NonFiniteSampleError):
            fit_abg(base + [MetricSample(float("inf"), 0.5)])

    def test_options_validation(self):
        with pytest.raises(ValueError):
            FitOptions(max_iterations=0)
        with pytest.raises(ValueError):
            FitOptions(tolerance=0.0)
        with pytest.raises(ValueError):
            FitOptions(multistart_count=0)
        with pytest.raises(ValueError):
            FitOptions(seed=-1)
        with pytest.raises(ValueError):
            FitOptions(bounds=((1e-12, 1.0),) * 3)
        with pytest.raises(ValueError):
            FitOptions(bounds=((0.0, 1.0),) + ((1e-12, 1.0),) * 3)
        with pytest.raises(ValueError):
            FitOptions(bounds=((2.0, 1.0),) + ((1e-12, 1.0),) * 3)


class TestJacobian:
    def test_matches_central_differences(self):
        xs = np.concatenate([[0.0], np.geomspace(0.1, 10.0, 12)])
        theta = np.array([0.9, 1.3, 1.7, 1.1])
        y = _family(theta, xs) + 0.01
        sqrt_w = np.sqrt(np.linspace(0.5, 2.0, len(xs)))
        u = np.log(theta)
        analytic = _jacobian_log(theta, xs, sqrt_w)
        h = 1e-6
        numeric = np.empty_like(analytic)
        for j in range(4):
            up, dn = u.copy(), u.copy()
            up[j] += h
            dn[j] -= h
            r_up = sqrt_w * (_family(np.exp(up), xs) - y)
            r_dn = sqrt_w * (_family(np.exp(dn), xs) - y)
            numeric[:, j] = (r_up - r_dn) / (2.0 * h)
        assert np.max(np.abs(analytic - numeric)) < 1e-6

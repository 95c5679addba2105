"""Signal-processing primitives against analytic and library oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import signal as sps

from decaf.dsp import (
    add_noise_at_snr,
    butterworth_bandpass,
    pearson,
    pink_noise,
    welch_psd,
    window_slices,
)
from decaf.errors import ConfigError


class TestPearson:
    def test_affine_map_gives_one(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(500) * 50.0
        assert pearson(x, 2.0 * x + 3.0) == pytest.approx(1.0, abs=1e-9)

    def test_negation_gives_minus_one(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(500) * 50.0
        assert pearson(x, -x) == pytest.approx(-1.0, abs=1e-9)

    def test_constant_input_is_zero(self):
        x = np.arange(10.0)
        assert pearson(x, np.full(10, 3.0)) == 0.0
        assert pearson(np.zeros(10), x) == 0.0

    def test_length_mismatch_and_short_inputs(self):
        with pytest.raises(ValueError):
            pearson([1.0, 2.0], [1.0])
        with pytest.raises(ValueError):
            pearson([1.0], [1.0])

    def test_matches_numpy_corrcoef(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal(300)
        y = rng.standard_normal(300) + 0.5 * x
        assert pearson(x, y) == pytest.approx(np.corrcoef(x, y)[0, 1], abs=1e-6)

    @given(st.integers(0, 2**32 - 1), st.floats(0.1, 50.0), st.floats(-100.0, 100.0))
    @settings(max_examples=50, deadline=None)
    def test_positive_affine_invariance(self, seed, a, b):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(64) * 100.0
        y = rng.standard_normal(64) * 100.0
        assert pearson(x, a * y + b) == pytest.approx(pearson(x, y), abs=1e-9)
        assert pearson(x, -y) == pytest.approx(-pearson(x, y), abs=1e-9)


class TestWelch:
    def test_tone_peak_at_exact_bin(self):
        # nperseg=128 at fs=64 gives 0.5 Hz bins; 4 Hz falls exactly on bin 8
        t = np.arange(64 * 20) / 64.0
        est = welch_psd(np.sin(2 * np.pi * 4.0 * t), fs=64.0)
        assert est.freqs_hz[np.argmax(est.power)] == pytest.approx(4.0)

    def test_constant_signal_power_confined_to_dc_lobe(self):
        est = welch_psd(np.full(512, 3.0), fs=64.0)
        assert np.argmax(est.power) == 0
        # Hann DC leakage reaches bin 1 only; everything above is numerically zero
        assert np.all(est.power[2:] < est.power[0] * 1e-20)

    def test_white_noise_flat_within_3db(self):
        # interior bins only: the one-sided density convention leaves the
        # Nyquist endpoint undoubled, 3 dB below flat by construction
        for seed in range(10):
            rng = np.random.default_rng(seed)
            est = welch_psd(rng.standard_normal(64 * 120), fs=64.0)
            sel = (est.freqs_hz >= 1.0) & (est.freqs_hz < 32.0)
            db = est.power_db[sel]
            med = np.median(db)
            assert np.all(np.abs(db - med) < 3.0)

    def test_amplitude_scaling_is_quadratic(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(2048)
        p1 = welch_psd(x, fs=64.0).power
        p3 = welch_psd(3.0 * x, fs=64.0).power
        assert np.allclose(p3, 9.0 * p1, rtol=1e-9)

    def test_matches_scipy_welch(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal(4096)
        est = welch_psd(x, fs=64.0, nperseg=128, noverlap=64)
        f_ref, p_ref = sps.welch(x, fs=64.0, window="hann", nperseg=128,
                                 noverlap=64, detrend=False)
        assert np.allclose(est.freqs_hz, f_ref)
        assert np.allclose(est.power, p_ref, rtol=1e-10)

    def test_short_signal_rejected(self):
        with pytest.raises(ValueError):
            welch_psd(np.ones(100), nperseg=128)

    def test_band_power_partition(self):
        rng = np.random.default_rng(5)
        est = welch_psd(rng.standard_normal(4096), fs=64.0)
        total = est.total_power()
        parts = est.band_power(0, 8) + est.band_power(8, 16) + est.band_power(16, 33)
        assert parts == pytest.approx(total, rel=1e-12)


class TestButterworth:
    def test_in_band_tone_preserved(self):
        t = np.arange(64 * 30) / 64.0
        x = np.sin(2 * np.pi * 4.0 * t)
        y = butterworth_bandpass(x, 0.5, 8.0, fs=64.0)
        mid = slice(200, -200)  # skip filter edge transients
        ratio = y[mid].std() / x[mid].std()
        assert abs(ratio - 1.0) < 0.05

    def test_out_of_band_tone_crushed(self):
        t = np.arange(64 * 30) / 64.0
        x = np.sin(2 * np.pi * 25.0 * t)
        y = butterworth_bandpass(x, 0.5, 8.0, fs=64.0)
        mid = slice(200, -200)
        atten_db = 20 * np.log10(y[mid].std() / x[mid].std())
        assert atten_db < -40.0

    def test_zero_in_zero_out(self):
        assert np.array_equal(butterworth_bandpass(np.zeros(500), 0.5, 8.0, fs=64.0),
                              np.zeros(500))

    def test_bad_band_edges(self):
        for lo, hi in ((0.0, 8.0), (8.0, 0.5), (1.0, 32.0), (1.0, 40.0)):
            with pytest.raises(ConfigError):
                butterworth_bandpass(np.ones(100), lo, hi, fs=64.0)


class TestAddNoise:
    def test_exact_snr_at_zero_db(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((2048, 8)) * 2.0
        noisy = add_noise_at_snr(x, 0.0, np.random.default_rng(1))
        p_sig = np.mean(x ** 2)
        p_noise = np.mean((noisy - x) ** 2)
        assert abs(10 * np.log10(p_sig / p_noise)) < 0.05

    @pytest.mark.parametrize("snr_db", [-10.0, -5.0, 0.0, 5.0, 10.0])
    def test_snr_grid_within_tolerance(self, snr_db):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((1000, 4))
        noisy = add_noise_at_snr(x, snr_db, np.random.default_rng(8))
        measured = 10 * np.log10(np.mean(x ** 2) / np.mean((noisy - x) ** 2))
        assert measured == pytest.approx(snr_db, abs=0.05)

    def test_high_snr_barely_perturbs(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((5000, 4))
        noisy = add_noise_at_snr(x, 100.0, np.random.default_rng(3))
        for ch in range(4):
            assert pearson(x[:, ch], noisy[:, ch]) > 0.999

    def test_same_seed_identical_bytes(self):
        x = np.random.default_rng(4).standard_normal((64, 3))
        a = add_noise_at_snr(x, 5.0, np.random.default_rng(99))
        b = add_noise_at_snr(x, 5.0, np.random.default_rng(99))
        assert a.tobytes() == b.tobytes()

    def test_zero_power_rejected(self):
        with pytest.raises(ValueError):
            add_noise_at_snr(np.zeros((10, 2)), 0.0, np.random.default_rng(0))


class TestWindowSlices:
    def test_non_overlapping(self):
        assert window_slices(384, 192, 192).starts == [0, 192]

    def test_exact_fit_tail(self):
        assert window_slices(230, 192, 38).starts == [0, 38]

    def test_too_short_gives_empty_plan(self):
        assert window_slices(100, 192, 38).starts == []

    def test_bad_params(self):
        with pytest.raises(ValueError):
            window_slices(100, 0, 1)
        with pytest.raises(ValueError):
            window_slices(100, 10, 0)

    @given(st.integers(0, 5000), st.integers(1, 400), st.integers(1, 400))
    @settings(max_examples=100, deadline=None)
    def test_matches_brute_force(self, total, win, hop):
        plan = window_slices(total, win, hop)
        brute = [s for s in range(0, total + 1, hop) if s + win <= total]
        assert plan.starts == brute
        for a, b in zip(plan.starts, plan.starts[1:]):
            assert b - a == hop
        assert all(s + win <= total for s in plan.starts)


class TestPinkNoise:
    def test_unit_variance(self):
        x = pink_noise(64 * 60, np.random.default_rng(0))
        assert np.var(x) == pytest.approx(1.0, rel=0.02)

    def test_spectral_slope_near_minus_one(self):
        for seed in range(5):
            x = pink_noise(64 * 240, np.random.default_rng(seed))
            est = welch_psd(x, fs=64.0, nperseg=512, noverlap=256)
            sel = (est.freqs_hz >= 1.0) & (est.freqs_hz <= 20.0)
            slope = np.polyfit(np.log10(est.freqs_hz[sel]),
                               np.log10(est.power[sel]), 1)[0]
            assert slope == pytest.approx(-1.0, abs=0.3)

    def test_deterministic(self):
        a = pink_noise(1000, np.random.default_rng(5))
        b = pink_noise(1000, np.random.default_rng(5))
        assert a.tobytes() == b.tobytes()

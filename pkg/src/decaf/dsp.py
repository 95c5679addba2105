"""Deterministic signal-processing primitives.

Pure functions; anything stochastic takes an explicit numpy Generator, so
callers own determinism end to end.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import signal as _sps

from .errors import ConfigError


def pearson(x, y, eps: float = 1e-8) -> float:
    """Pearson correlation with epsilon-regularized denominators.

    rho = sum((x - mx)(y - my)) / ((std_x + eps) * (std_y + eps) * n), with
    population standard deviations. A constant input therefore yields 0
    rather than raising.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size:
        raise ValueError(f"pearson: length mismatch {x.size} vs {y.size}")
    if x.size < 2:
        raise ValueError(f"pearson: need at least 2 samples, got {x.size}")
    xm = x - x.mean()
    ym = y - y.mean()
    sx = np.sqrt(np.mean(xm * xm))
    sy = np.sqrt(np.mean(ym * ym))
    return float(np.dot(xm, ym) / ((sx + eps) * (sy + eps) * x.size))


@dataclass
class PsdEstimate:
    """One-sided Welch spectrum with its estimation parameters."""

    freqs_hz: np.ndarray
    power: np.ndarray  # linear units (x^2 / Hz)
    nperseg: int
    noverlap: int
    window: str
    fs: float

    @property
    def power_db(self) -> np.ndarray:
        return 10.0 * np.log10(np.maximum(self.power, 1e-30))

    def band_power(self, lo_hz: float, hi_hz: float) -> float:
        """Integrated power over lo_hz <= f < hi_hz."""
        df = self.freqs_hz[1] - self.freqs_hz[0]
        sel = (self.freqs_hz >= lo_hz) & (self.freqs_hz < hi_hz)
        return float(np.sum(self.power[sel]) * df)

    def total_power(self) -> float:
        df = self.freqs_hz[1] - self.freqs_hz[0]
        return float(np.sum(self.power) * df)


def welch_psd(x, fs: float = 64.0, nperseg: int = 128, noverlap: int = 64,
              window: str = "hann") -> PsdEstimate:
    """Averaged-periodogram PSD (one-sided, density scaling, no detrending).

    Mean of |rfft(segment * w)|^2 over segments hopped by nperseg - noverlap,
    normalized by fs * sum(w^2), with interior bins doubled for the one-sided
    view.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size < nperseg:
        raise ValueError(
            f"welch_psd: signal length {x.size} shorter than one segment ({nperseg})"
        )
    if window != "hann":
        raise ConfigError(f"welch_psd: unsupported window {window!r}")
    n = nperseg
    w = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)  # periodic Hann
    step = n - noverlap
    if step < 1:
        raise ConfigError(f"welch_psd: noverlap {noverlap} must be < nperseg {n}")
    starts = range(0, x.size - n + 1, step)
    acc = np.zeros(n // 2 + 1)
    for s in starts:
        spec = np.fft.rfft(x[s:s + n] * w)
        acc += spec.real ** 2 + spec.imag ** 2
    acc /= len(starts)
    scale = 1.0 / (fs * np.sum(w * w))
    psd = acc * scale
    psd[1:-1] *= 2.0  # one-sided: double everything but DC and Nyquist
    if n % 2:
        psd[-1] *= 2.0
    freqs = np.fft.rfftfreq(n, d=1.0 / fs)
    return PsdEstimate(freqs, psd, nperseg=n, noverlap=noverlap, window=window, fs=fs)


def butterworth_bandpass(x, lo_hz: float, hi_hz: float, order: int = 4,
                         fs: float = 64.0) -> np.ndarray:
    """Zero-phase (forward-backward) Butterworth band-pass. Offline use only."""
    if not (0.0 < lo_hz < hi_hz < fs / 2.0):
        raise ConfigError(
            f"butterworth_bandpass: need 0 < lo < hi < fs/2, got lo={lo_hz}, "
            f"hi={hi_hz}, fs={fs}"
        )
    sos = _sps.butter(order, [lo_hz, hi_hz], btype="bandpass", fs=fs, output="sos")
    return _sps.sosfiltfilt(sos, np.asarray(x, dtype=np.float64))


def add_noise_at_snr(x, snr_db: float, rng: np.random.Generator) -> np.ndarray:
    """Add white Gaussian noise calibrated to an exact signal-to-noise ratio.

    Power is the mean square over the whole array (all channels and samples).
    The drawn noise realization is rescaled to hit the target power exactly,
    so the measured SNR matches snr_db up to float rounding.
    """
    x = np.asarray(x, dtype=np.float64)
    p_sig = float(np.mean(x * x))
    if p_sig == 0.0:
        raise ValueError("add_noise_at_snr: input has zero power")
    p_noise = p_sig / (10.0 ** (snr_db / 10.0))
    noise = rng.standard_normal(x.shape)
    noise *= np.sqrt(p_noise / np.mean(noise * noise))
    return x + noise


@dataclass
class WindowPlan:
    """Start indices of fixed-length windows hopped across a signal."""

    window_len: int
    hop: int
    starts: list = field(default_factory=list)

    def __len__(self):
        return len(self.starts)


def window_slices(total_len: int, window_len: int, hop: int) -> WindowPlan:
    """Starts 0, hop, 2*hop, ... while the full window fits; partial tail dropped."""
    if window_len < 1 or hop < 1:
        raise ValueError(
            f"window_slices: window_len and hop must be >= 1, got {window_len}, {hop}"
        )
    if total_len < window_len:
        return WindowPlan(window_len, hop, [])
    starts = list(range(0, total_len - window_len + 1, hop))
    return WindowPlan(window_len, hop, starts)


def pink_noise(n: int, rng: np.random.Generator) -> np.ndarray:
    """1/f-shaped Gaussian noise, normalized to unit variance."""
    if n < 1:
        raise ValueError(f"pink_noise: n must be >= 1, got {n}")
    if n == 1:
        return np.zeros(1)
    white = rng.standard_normal(n)
    spec = np.fft.rfft(white)
    f = np.fft.rfftfreq(n)
    spec[0] = 0.0
    spec[1:] /= np.sqrt(f[1:])
    x = np.fft.irfft(spec, n)
    return x / x.std()

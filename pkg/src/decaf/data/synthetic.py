"""Seeded synthetic EEG/envelope benchmark.

Per stimulus, the envelope is band-passed (0.5-8 Hz) white noise, softplus
rectified and min-max normalized to [0, 1]. Per subject, EEG mixes K=3
latency pathways: each is the envelope (one pathway raised to a power first)
convolved with a gamma-shaped kernel peaking at {80, 150, 250} ms, delayed by
a global 500 ms response offset, projected through a channel-smoothed random
64xK mixing matrix, plus per-channel pink background noise at a configured
SNR. The kernels are smooth low-pass shapes, so EEG carries mostly
low-frequency envelope information; high-frequency texture survives only in
the envelope itself.

All randomness derives from the master seed via SeedSequence entropy lists:
stimulus streams depend only on the stimulus index (every subject "hears"
the same story), subject streams only on the subject index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..dsp import butterworth_bandpass, pink_noise
from ..errors import ConfigError
from .container import DatasetSplit, Recording

_STIM_DOMAIN = 1
_SUBJ_DOMAIN = 2
_NOISE_DOMAIN = 3


@dataclass
class GeneratorConfig:
    master_seed: int
    n_subjects: int = 4
    recordings_per_subject: int = 5
    duration_s: float = 120.0
    kernel_peaks_ms: tuple = (80.0, 150.0, 250.0)
    nonlinearity_exponent: float = 0.6
    eeg_snr_db: Optional[float] = 0.0  # None disables background noise
    fs: int = 64
    n_channels: int = 64

    def __post_init__(self):
        n = int(self.duration_s * self.fs)
        if n < 2 * 192 + 32:
            raise ConfigError(
                f"duration_s={self.duration_s} gives {n} samples; need at least "
                f"{2 * 192 + 32} for one context + window + delay"
            )
        if self.n_subjects < 1 or self.recordings_per_subject < 3:
            raise ConfigError(
                "need n_subjects >= 1 and recordings_per_subject >= 3 "
                "(train/valid/test splits take one stimulus each at minimum)"
            )

    @property
    def n_samples(self) -> int:
        return int(self.duration_s * self.fs)


def _rng(*entropy) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(entropy))))


def _quantize(x: np.ndarray) -> np.ndarray:
    # container payloads are f32; quantizing here makes round trips bit-exact
    return x.astype(np.float32).astype(np.float64)


def make_envelope(cfg: GeneratorConfig, stimulus_idx: int) -> np.ndarray:
    rng = _rng(cfg.master_seed, _STIM_DOMAIN, stimulus_idx)
    white = rng.standard_normal(cfg.n_samples)
    band = butterworth_bandpass(white, 0.5, 8.0, fs=cfg.fs)
    band /= band.std()  # calibrate rectifier drive
    env = np.logaddexp(0.0, band)  # softplus
    env -= env.min()
    env /= env.max()
    return env


def _gamma_kernel(peak_ms: float, fs: int) -> np.ndarray:
    # (tau/tau_k) * exp(1 - tau/tau_k) on tau in [0, 400 ms]; unit peak at tau_k
    tau = np.arange(int(0.4 * fs) + 1) / fs
    tau_k = peak_ms / 1000.0
    return (tau / tau_k) * np.exp(1.0 - tau / tau_k)


def make_mixing_matrix(cfg: GeneratorConfig, subject_idx: int) -> np.ndarray:
    rng = _rng(cfg.master_seed, _SUBJ_DOMAIN, subject_idx)
    m = rng.standard_normal((cfg.n_channels, len(cfg.kernel_peaks_ms)))
    # smooth across adjacent channels (edge-replicated 1-2-1 average)
    padded = np.vstack([m[:1], m, m[-1:]])
    return 0.25 * padded[:-2] + 0.5 * padded[1:-1] + 0.25 * padded[2:]


def generate_recording(cfg: GeneratorConfig, subject_idx: int,
                       stimulus_idx: int) -> Recording:
    env = make_envelope(cfg, stimulus_idx)
    delay = int(0.5 * cfg.fs)  # global 500 ms response offset

    pathways = np.empty((cfg.n_samples, len(cfg.kernel_peaks_ms)))
    for k, peak_ms in enumerate(cfg.kernel_peaks_ms):
        drive = env ** cfg.nonlinearity_exponent if k == 1 else env
        resp = np.convolve(drive, _gamma_kernel(peak_ms, cfg.fs))[:cfg.n_samples]
        shifted = np.zeros(cfg.n_samples)
        shifted[delay:] = resp[:cfg.n_samples - delay]
        pathways[:, k] = shifted

    eeg = pathways @ make_mixing_matrix(cfg, subject_idx).T  # [T, C]

    if cfg.eeg_snr_db is not None:
        rng = _rng(cfg.master_seed, _NOISE_DOMAIN, subject_idx, stimulus_idx)
        noise = np.column_stack(
            [pink_noise(cfg.n_samples, rng) for _ in range(cfg.n_channels)]
        )
        p_sig = np.mean(eeg ** 2)
        scale = np.sqrt(p_sig / (10.0 ** (cfg.eeg_snr_db / 10.0)) /
                        np.mean(noise ** 2))
        eeg = eeg + scale * noise

    return Recording(
        subject_id=f"sub{subject_idx:02d}",
        stimulus_id=f"stim{stimulus_idx:02d}",
        eeg=_quantize(eeg),
        envelope=_quantize(env),
        fs=cfg.fs,
    )


def split_for_stimulus(cfg: GeneratorConfig, stimulus_idx: int) -> str:
    """Last stimulus per subject is test, next-to-last valid, rest train;
    the mapping depends only on the stimulus, so test stimuli are unseen."""
    if stimulus_idx == cfg.recordings_per_subject - 1:
        return "test"
    if stimulus_idx == cfg.recordings_per_subject - 2:
        return "valid"
    return "train"


def generate_synthetic_dataset(cfg: GeneratorConfig) -> DatasetSplit:
    ds = DatasetSplit()
    for subject_idx in range(cfg.n_subjects):
        for stimulus_idx in range(cfg.recordings_per_subject):
            rec = generate_recording(cfg, subject_idx, stimulus_idx)
            ds.recordings(split_for_stimulus(cfg, stimulus_idx)).append(rec)
    ds.validate()
    return ds

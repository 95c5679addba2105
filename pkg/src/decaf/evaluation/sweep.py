"""Robustness sweep: decode with calibrated noise injected into test EEG."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data import Recording
from ..dsp import add_noise_at_snr
from .decode import decode_recordings
from .metrics import score_decodes

SNR_GRID_DB = (-10.0, -5.0, 0.0, 5.0, 10.0)


@dataclass
class SweepResult:
    snr_grid: tuple
    noise_seeds: tuple
    # (model_name, snr_db) -> mean over noise seeds of grand-mean rho
    mean_rho: dict = field(default_factory=dict)
    per_seed: dict = field(default_factory=dict)  # (model, snr, seed) -> rho

    def curve(self, model_name: str):
        return [self.mean_rho[(model_name, snr)] for snr in self.snr_grid]


def _noisy_copy(rec: Recording, snr_db: float, seed: int, rec_index: int):
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence([seed, rec_index])))
    return Recording(rec.subject_id, rec.stimulus_id,
                     add_noise_at_snr(rec.eeg, snr_db, rng), rec.envelope, rec.fs)


def noise_sweep(models: dict, recordings, snr_grid=SNR_GRID_DB,
                noise_seeds=(0, 1, 2)) -> SweepResult:
    """models: name -> (model, decode_mode). Noise is re-drawn per seed and
    applied to each recording's EEG jointly over channels; every model sees
    the identical corrupted inputs."""
    result = SweepResult(tuple(snr_grid), tuple(noise_seeds))
    for snr_db in snr_grid:
        for seed in noise_seeds:
            noisy = [_noisy_copy(r, snr_db, seed, i)
                     for i, r in enumerate(recordings)]
            for name, (model, mode) in models.items():
                decoded = decode_recordings(model, noisy, mode)
                report = score_decodes(decoded, model_name=name, mode=mode)
                result.per_seed[(name, snr_db, seed)] = report.mean_rho
        for name in models:
            result.mean_rho[(name, snr_db)] = float(np.mean(
                [result.per_seed[(name, snr_db, s)] for s in noise_seeds]))
    return result

"""Spectral decomposition of the decoder's branches against the true envelope."""

from __future__ import annotations

import numpy as np

from ..dsp import PsdEstimate, welch_psd
from .decode import decode_recordings

BRANCHES = ("ground_truth", "eeg_branch", "prior_branch", "fused")


def psd_report(model, recordings, mode: str = "recursive", fs: float = 64.0,
               nperseg: int = 128, noverlap: int = 64) -> dict:
    """Welch PSD of the concatenated test-set ground truth, branch outputs,
    and fused output, on a shared frequency grid. Returns branch -> PsdEstimate."""
    decoded = decode_recordings(model, recordings, mode)
    signals = {
        "ground_truth": np.concatenate([d.concat("target") for d in decoded]),
        "eeg_branch": np.concatenate([d.concat("a_eeg") for d in decoded]),
        "prior_branch": np.concatenate([d.concat("a_prior") for d in decoded]),
        "fused": np.concatenate([d.concat("output") for d in decoded]),
    }
    return {
        name: welch_psd(sig, fs=fs, nperseg=nperseg, noverlap=noverlap)
        for name, sig in signals.items()
    }


def band_power_db(est: PsdEstimate, lo_hz: float, hi_hz: float) -> float:
    return float(10.0 * np.log10(max(est.band_power(lo_hz, hi_hz), 1e-30)))

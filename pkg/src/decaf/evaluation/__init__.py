"""Recursive decoding, scoring, statistics, noise sweeps, spectral reports."""

from .decode import (
    MODES,
    DecodedRecording,
    DecodedWindow,
    decode_recording,
    decode_recordings,
)
from .metrics import (
    EvalReport,
    SubjectScore,
    cohens_d,
    paired_stats,
    relative_gain_pct,
    score_decodes,
    wilcoxon_signed_rank,
)
from .reports import (
    eval_report_csv,
    history_csv,
    history_svg,
    psd_csv,
    psd_svg,
    summary_table_csv,
    sweep_csv,
    sweep_svg,
)
from .spectra import BRANCHES, band_power_db, psd_report
from .sweep import SNR_GRID_DB, SweepResult, noise_sweep

__all__ = [
    "BRANCHES",
    "DecodedRecording",
    "DecodedWindow",
    "EvalReport",
    "MODES",
    "SNR_GRID_DB",
    "SubjectScore",
    "SweepResult",
    "band_power_db",
    "cohens_d",
    "decode_recording",
    "decode_recordings",
    "eval_report_csv",
    "history_csv",
    "history_svg",
    "noise_sweep",
    "paired_stats",
    "psd_csv",
    "psd_report",
    "psd_svg",
    "relative_gain_pct",
    "score_decodes",
    "summary_table_csv",
    "sweep_csv",
    "sweep_svg",
    "wilcoxon_signed_rank",
]

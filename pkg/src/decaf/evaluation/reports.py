"""Deterministic CSV and SVG artifacts for evaluation results.

Column orders are part of the interface:
  eval CSV:    row_type,model,mode,subject,params,rho,rho_std,n_windows,gain_pct
  sweep CSV:   model,snr_db,mean_rho[,seed columns...]
  psd CSV:     freq_hz,<branch> dB columns in branch order
"""

from __future__ import annotations

import numpy as np

from ..svg import line_chart
from .metrics import EvalReport
from .spectra import BRANCHES


def fmt(x) -> str:
    if x is None:
        return "--"
    if isinstance(x, float):
        return repr(x)  # shortest round-trip form; stable across reruns
    return str(x)


def eval_report_csv(report: EvalReport) -> str:
    lines = ["row_type,model,mode,subject,params,rho,rho_std,n_windows,gain_pct"]
    for s in report.per_subject:
        lines.append(f"subject,{report.model_name},{report.mode},{s.subject_id},"
                     f"{report.param_count},{fmt(s.rho)},,{s.n_windows},")
    lines.append(f"summary,{report.model_name},{report.mode},,"
                 f"{report.param_count},{fmt(report.mean_rho)},"
                 f"{fmt(report.std_rho)},"
                 f"{sum(s.n_windows for s in report.per_subject)},"
                 f"{fmt(report.relative_gain_pct)}")
    return "\n".join(lines) + "\n"


def summary_table_csv(reports, stats=None) -> str:
    """One row per model, mirroring the headline results table; ``stats`` maps
    model name -> (p_value, cohens_d) against the comparison model."""
    lines = ["model,mode,params,rho_mean,rho_std,gain_pct,p_value,cohens_d"]
    for r in reports:
        p, d = (stats or {}).get(r.model_name, (None, None))
        lines.append(f"{r.model_name},{r.mode},{r.param_count},{fmt(r.mean_rho)},"
                     f"{fmt(r.std_rho)},{fmt(r.relative_gain_pct)},{fmt(p)},{fmt(d)}")
    return "\n".join(lines) + "\n"


def sweep_csv(result) -> str:
    names = sorted({name for name, _ in result.mean_rho})
    header = "model,snr_db,mean_rho," + ",".join(
        f"seed{s}" for s in result.noise_seeds)
    lines = [header]
    for name in names:
        for snr in result.snr_grid:
            per_seed = [fmt(result.per_seed[(name, snr, s)])
                        for s in result.noise_seeds]
            lines.append(f"{name},{fmt(snr)},{fmt(result.mean_rho[(name, snr)])},"
                         + ",".join(per_seed))
    return "\n".join(lines) + "\n"


def sweep_svg(result) -> str:
    names = sorted({name for name, _ in result.mean_rho})
    series = {name: (list(result.snr_grid), result.curve(name)) for name in names}
    return line_chart(series, title="Reconstruction vs EEG noise level",
                      xlabel="SNR (dB)", ylabel="mean rho")


def psd_csv(psds: dict) -> str:
    freqs = psds[BRANCHES[0]].freqs_hz
    lines = ["freq_hz," + ",".join(f"{b}_db" for b in BRANCHES)]
    for i, f in enumerate(freqs):
        row = [fmt(float(f))] + [fmt(float(psds[b].power_db[i])) for b in BRANCHES]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def psd_svg(psds: dict) -> str:
    series = {}
    for b in BRANCHES:
        est = psds[b]
        sel = est.freqs_hz >= 0.5  # log-free dB view, skip the DC bin
        series[b] = (list(est.freqs_hz[sel]), list(est.power_db[sel]))
    return line_chart(series, title="Envelope PSD by branch",
                      xlabel="frequency (Hz)", ylabel="power (dB)")


def history_csv(history) -> str:
    lines = ["epoch,train_loss,val_rho,lr"]
    for e in history.epochs:
        lines.append(f"{e.epoch},{fmt(e.train_loss)},{fmt(e.val_rho)},{fmt(e.lr)}")
    return "\n".join(lines) + "\n"


def history_svg(history) -> str:
    xs = [e.epoch for e in history.epochs]
    return line_chart(
        {"train_loss": (xs, [e.train_loss for e in history.epochs]),
         "val_rho": (xs, [e.val_rho for e in history.epochs])},
        title="Training history", xlabel="epoch", ylabel="value")

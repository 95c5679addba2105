"""Command-line front end: dataset generation, training, evaluation, reports.

Configuration is an INI file with sections [data], [model], [train], [eval];
unknown sections or keys are rejected, and the parsed config is echoed into
every run directory for provenance. All commands are pure functions of
(config, data, seed): reruns write byte-identical artifacts.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

import numpy as np

from .data import (
    GeneratorConfig,
    ManifestEntry,
    generate_recording,
    load_dataset,
    split_for_stimulus,
    write_manifest,
    write_recording,
)
from .errors import ConfigError, DataFormatError, NumericsError
from .evaluation import (
    MODES,
    SNR_GRID_DB,
    decode_recordings,
    eval_report_csv,
    history_csv,
    history_svg,
    noise_sweep,
    paired_stats,
    psd_csv,
    psd_report,
    psd_svg,
    relative_gain_pct,
    score_decodes,
    summary_table_csv,
    sweep_csv,
    sweep_svg,
)
from .fsutil import atomic_write_text
from .models import (
    DecafConfig,
    DecafModel,
    EegEncoderConfig,
    EncoderOnlyConfig,
    EncoderOnlyModel,
    ForecasterConfig,
    MtrfModel,
    load_checkpoint,
    save_checkpoint,
)
from .models.mtrf import DEFAULT_LAMBDA_GRID
from .training import LossWeights, TrainConfig, train, train_baseline_mtrf

_KNOWN_KEYS = {
    "data": {"seed", "n_subjects", "recordings_per_subject", "duration_s",
             "eeg_snr_db", "nonlinearity_exponent", "n_channels"},
    "model": {"kind", "seed", "d_model", "n_layers", "n_heads", "ffn_dim",
              "dropout", "window_len", "forecaster_channels", "forecaster_kernel",
              "forecaster_hidden", "forecaster_layers", "forecaster_heads",
              "forecaster_head_hidden", "lambda_grid"},
    "train": {"epochs", "batch_size", "patience", "schedule", "context_regime",
              "ss_p_end", "seed", "shuffle", "grad_clip", "l1_weight",
              "pearson_weight"},
    "eval": {"mode", "snr_grid", "noise_seeds"},
}


def read_config(path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    loaded = cp.read(path)
    if not loaded:
        raise ConfigError(f"config file not found: {path}")
    for section in cp.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in cp[section]:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
    if not cp.has_option("data", "seed"):
        raise ConfigError("missing mandatory key 'seed' in section [data]")
    return cp


def echo_config(cp: configparser.ConfigParser, out_dir: Path) -> None:
    import io

    buf = io.StringIO()
    cp.write(buf)
    atomic_write_text(out_dir / "config_echo.ini", buf.getvalue())


def _floats(text: str):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text: str):
    return tuple(int(x) for x in text.split(",") if x.strip())


def generator_config(cp) -> GeneratorConfig:
    d = cp["data"] if cp.has_section("data") else {}
    snr_text = d.get("eeg_snr_db", "0").strip().lower()
    return GeneratorConfig(
        master_seed=int(d["seed"]),
        n_subjects=int(d.get("n_subjects", 4)),
        recordings_per_subject=int(d.get("recordings_per_subject", 5)),
        duration_s=float(d.get("duration_s", 120.0)),
        nonlinearity_exponent=float(d.get("nonlinearity_exponent", 0.6)),
        eeg_snr_db=None if snr_text == "none" else float(snr_text),
        n_channels=int(d.get("n_channels", 64)),
    )


def model_from_config(cp, kind: str):
    m = cp["model"] if cp.has_section("model") else {}
    seed = int(m.get("seed", cp["data"]["seed"]))
    if kind == "mtrf":
        grid = _floats(m["lambda_grid"]) if "lambda_grid" in m else DEFAULT_LAMBDA_GRID
        return ("mtrf", grid)
    window_len = int(m.get("window_len", 192))
    encoder = EegEncoderConfig(
        d_model=int(m.get("d_model", 64)),
        n_layers=int(m.get("n_layers", 2)),
        n_heads=int(m.get("n_heads", 2)),
        ffn_dim=int(m.get("ffn_dim", 256)),
        dropout=float(m.get("dropout", 0.1)),
        n_channels=int(cp["data"].get("n_channels", 64)),
        window_len=window_len,
    )
    if kind == "eeg_only":
        return EncoderOnlyModel(EncoderOnlyConfig(seed=seed, encoder=encoder))
    forecaster = ForecasterConfig(
        embed_channels=int(m.get("forecaster_channels", 64)),
        embed_kernel=int(m.get("forecaster_kernel", 7)),
        gru_hidden=int(m.get("forecaster_hidden", 64)),
        gru_layers=int(m.get("forecaster_layers", 2)),
        attn_heads=int(m.get("forecaster_heads", 2)),
        head_hidden=int(m.get("forecaster_head_hidden", 128)),
        window_len=window_len,
    )
    return DecafModel(DecafConfig(seed=seed, encoder=encoder, forecaster=forecaster))


def train_config(cp) -> TrainConfig:
    t = cp["train"] if cp.has_section("train") else {}
    return TrainConfig(
        epochs=int(t.get("epochs", 10)),
        batch_size=int(t.get("batch_size", 64)),
        patience=int(t.get("patience", 3)),
        schedule=t.get("schedule", "auto"),
        context_regime=t.get("context_regime", "teacher_forcing"),
        ss_p_end=float(t.get("ss_p_end", 0.5)),
        seed=int(t.get("seed", cp["data"]["seed"])),
        shuffle=t.get("shuffle", "true").strip().lower() in ("1", "true", "yes"),
        grad_clip=float(t.get("grad_clip", 5.0)),
        loss=LossWeights(l1=float(t.get("l1_weight", 1.0)),
                         pearson=float(t.get("pearson_weight", 0.2))),
    )


def _prepare_out_dir(out: Path, force: bool) -> None:
    if out.exists() and any(out.iterdir()):
        if not force:
            raise ConfigError(
                f"output directory {out} exists and is not empty; use --force"
            )
        for p in sorted(out.rglob("*"), reverse=True):
            p.unlink() if p.is_file() else p.rmdir()
    out.mkdir(parents=True, exist_ok=True)


def cmd_gen_data(args) -> int:
    cp = read_config(args.config)
    cfg = generator_config(cp)
    out = Path(args.out)
    _prepare_out_dir(out, args.force)
    entries = []
    for subject_idx in range(cfg.n_subjects):
        for stimulus_idx in range(cfg.recordings_per_subject):
            rec = generate_recording(cfg, subject_idx, stimulus_idx)
            eeg_path = f"{rec.subject_id}_{rec.stimulus_id}.eeg.env1"
            env_path = f"{rec.subject_id}_{rec.stimulus_id}.env.env1"
            write_recording(rec, out / eeg_path, out / env_path)
            entries.append(ManifestEntry(rec.subject_id, rec.stimulus_id,
                                         eeg_path, env_path,
                                         split_for_stimulus(cfg, stimulus_idx)))
    echo_config(cp, out)
    # the manifest lands last: its presence marks a complete dataset
    write_manifest(out / "manifest.txt", entries)
    print(f"wrote {len(entries)} recordings to {out}")
    return 0


def cmd_train(args) -> int:
    cp = read_config(args.config)
    ds = load_dataset(Path(args.data) / "manifest.txt")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    echo_config(cp, out)

    if args.model == "mtrf":
        _, grid = model_from_config(cp, "mtrf")
        model, scores = train_baseline_mtrf(ds, lambdas=grid)
        save_checkpoint(model, out / "best.ckpt",
                        metrics={"val_rho": scores[model.ridge_lambda],
                                 "lambda": model.ridge_lambda})
        lines = ["lambda,val_rho"] + [f"{lam!r},{rho!r}"
                                      for lam, rho in scores.items()]
        atomic_write_text(out / "lambda_grid.csv", "\n".join(lines) + "\n")
        print(f"mtrf: lambda={model.ridge_lambda:g} "
              f"val_rho={scores[model.ridge_lambda]:.4f}")
        return 0

    model = model_from_config(cp, args.model)
    cfg = train_config(cp)
    history = train(model, ds, cfg)
    best = history.epochs[history.best_epoch - 1]
    save_checkpoint(model, out / "best.ckpt", epoch=history.best_epoch,
                    metrics={"val_rho": best.val_rho})
    atomic_write_text(out / "history.csv", history_csv(history))
    atomic_write_text(out / "history.svg", history_svg(history))
    print(f"{args.model}: best epoch {history.best_epoch} "
          f"val_rho={best.val_rho:.4f} ({len(history.epochs)} epochs run)")
    return 0


def _load_models(paths):
    loaded = []
    for path in paths:
        model, header = load_checkpoint(path)
        loaded.append((Path(path).parent.name or Path(path).stem, model, header))
    return loaded


def cmd_eval(args) -> int:
    ds = load_dataset(Path(args.data) / "manifest.txt")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    reports = []
    baseline = None  # the linear model anchors the relative-gain column
    for name, model, header in _load_models(args.checkpoint):
        mode = args.mode
        if isinstance(model, (MtrfModel, EncoderOnlyModel)):
            mode = "eeg_only"
        decoded = decode_recordings(model, ds.test, mode)
        report = score_decodes(decoded, model_name=name, mode=mode,
                               param_count=model.param_count())
        if isinstance(model, MtrfModel) and baseline is None:
            baseline = report
        reports.append(report)
    for report in reports:
        if baseline is not None and report is not baseline:
            report.relative_gain_pct = relative_gain_pct(report.mean_rho,
                                                         baseline.mean_rho)
        atomic_write_text(out / f"eval_{report.model_name}.csv",
                          eval_report_csv(report))
    atomic_write_text(out / "summary.csv", summary_table_csv(reports))
    for report in reports:
        gain = ("--" if report.relative_gain_pct is None
                else f"{report.relative_gain_pct:+.1f}%")
        print(f"{report.model_name} [{report.mode}] rho={report.mean_rho:.4f} "
              f"+/- {report.std_rho:.4f} gain={gain}")
    return 0


def cmd_noise_sweep(args) -> int:
    ds = load_dataset(Path(args.data) / "manifest.txt")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    models = {}
    for name, model, header in _load_models(args.checkpoint):
        if hasattr(model, "forecaster"):
            for mode in args.modes.split(","):
                models[f"{name}:{mode}"] = (model, mode)
        else:
            models[name] = (model, "eeg_only")
    snr_grid = _floats(args.snrs)
    seeds = _ints(args.seeds)
    result = noise_sweep(models, ds.test, snr_grid=snr_grid, noise_seeds=seeds)
    atomic_write_text(out / "sweep.csv", sweep_csv(result))
    atomic_write_text(out / "sweep.svg", sweep_svg(result))
    for name in sorted(models):
        curve = ", ".join(f"{snr:g}dB:{result.mean_rho[(name, snr)]:.3f}"
                          for snr in snr_grid)
        print(f"{name}: {curve}")
    return 0


def cmd_psd(args) -> int:
    ds = load_dataset(Path(args.data) / "manifest.txt")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    model, header = load_checkpoint(args.checkpoint)
    if not hasattr(model, "forecaster"):
        raise ConfigError("psd needs a fused-decoder checkpoint "
                          "(branch decomposition requires both branches)")
    psds = psd_report(model, ds.test, mode=args.mode)
    atomic_write_text(out / "psd.csv", psd_csv(psds))
    atomic_write_text(out / "psd.svg", psd_svg(psds))
    print(f"psd written for {len(ds.test)} test recordings")
    return 0


def _parse_eval_csv(path):
    rows = Path(path).read_text().splitlines()
    header = rows[0].split(",")
    subjects = {}
    summary = None
    for line in rows[1:]:
        cells = dict(zip(header, line.split(",")))
        if cells["row_type"] == "subject":
            subjects[cells["subject"]] = float(cells["rho"])
        else:
            summary = cells
    return summary, subjects


def cmd_report(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    parsed = [(_parse_eval_csv(p)) for p in args.eval_csv]
    from .evaluation import EvalReport, SubjectScore

    reports = []
    for summary, subjects in parsed:
        r = EvalReport(model_name=summary["model"], mode=summary["mode"],
                       param_count=int(summary["params"]),
                       mean_rho=float(summary["rho"]),
                       std_rho=float(summary["rho_std"]))
        r.per_subject = [SubjectScore(s, rho, 0) for s, rho in sorted(subjects.items())]
        reports.append(r)
    by_name = {r.model_name: r for r in reports}
    if args.baseline not in by_name:
        raise ConfigError(f"baseline {args.baseline!r} not among "
                          f"{sorted(by_name)}")
    base = by_name[args.baseline]
    stats = {}
    for r in reports:
        if r is base:
            continue
        r.relative_gain_pct = relative_gain_pct(r.mean_rho, base.mean_rho)
        a = r.subject_scores()
        b = base.subject_scores()
        shared = sorted(set(a) & set(b))
        if len(shared) >= 5:
            stats[r.model_name] = paired_stats([a[s] for s in shared],
                                               [b[s] for s in shared])
    atomic_write_text(out / "report.csv", summary_table_csv(reports, stats))
    print(summary_table_csv(reports, stats).strip())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decaf",
        description="Dynamic EEG-to-envelope decoding: synthetic benchmark, "
                    "training, and evaluation harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate the synthetic dataset")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true",
                   help="overwrite a non-empty output directory")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train a model from scratch")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True, choices=("mtrf", "eeg_only", "decaf"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score checkpoints on the test split")
    p.add_argument("--checkpoint", action="append", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--mode", default="recursive", choices=MODES)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("noise-sweep", help="decode under calibrated EEG noise")
    p.add_argument("--checkpoint", action="append", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--modes", default="recursive,eeg_only")
    p.add_argument("--snrs", default=",".join(str(s) for s in SNR_GRID_DB))
    p.add_argument("--seeds", default="0,1,2")
    p.set_defaults(func=cmd_noise_sweep)

    p = sub.add_parser("psd", help="branch-level spectral report")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--mode", default="recursive", choices=MODES)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_psd)

    p = sub.add_parser("report", help="merge eval CSVs into a comparison table")
    p.add_argument("--eval-csv", action="append", required=True)
    p.add_argument("--baseline", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DataFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

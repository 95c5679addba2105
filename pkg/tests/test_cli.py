"""End-to-end CLI runs on a miniature dataset: exit codes, artifacts,
determinism."""

import hashlib
from pathlib import Path

import numpy as np
import pytest

from decaf.cli import main
from decaf.models import load_checkpoint

CONFIG = """\
[data]
seed = 77
n_subjects = 2
recordings_per_subject = 3
duration_s = 30
eeg_snr_db = 5
n_channels = 8

[model]
kind = decaf
seed = 5
d_model = 16
n_layers = 1
n_heads = 2
ffn_dim = 32
dropout = 0.0
window_len = 64
forecaster_channels = 8
forecaster_kernel = 3
forecaster_hidden = 8
forecaster_layers = 2
forecaster_heads = 2
forecaster_head_hidden = 16

[train]
epochs = 2
batch_size = 32
patience = 1
schedule = static:0.002
seed = 3

[eval]
mode = recursive
"""


def write_config(tmp_path, text=CONFIG) -> Path:
    path = tmp_path / "run.ini"
    path.write_text(text)
    return path


def dir_digest(root: Path) -> dict:
    out = {}
    for p in sorted(root.rglob("*")):
        if p.is_file():
            out[str(p.relative_to(root))] = hashlib.sha256(p.read_bytes()).hexdigest()
    return out


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """One generated dataset + one trained checkpoint, shared by CLI tests."""
    root = tmp_path_factory.mktemp("cli")
    cfg = write_config(root)
    assert main(["gen-data", "--config", str(cfg), "--out", str(root / "data")]) == 0
    assert main(["train", "--config", str(cfg), "--data", str(root / "data"),
                 "--model", "decaf", "--out", str(root / "decaf_run")]) == 0
    assert main(["train", "--config", str(cfg), "--data", str(root / "data"),
                 "--model", "mtrf", "--out", str(root / "mtrf_run")]) == 0
    return root


class TestGenData:
    def test_deterministic_rerun(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["gen-data", "--config", str(cfg),
                     "--out", str(tmp_path / "a")]) == 0
        assert main(["gen-data", "--config", str(cfg),
                     "--out", str(tmp_path / "b")]) == 0
        assert dir_digest(tmp_path / "a") == dir_digest(tmp_path / "b")

    def test_refuses_nonempty_without_force(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out = tmp_path / "data"
        out.mkdir()
        (out / "junk.txt").write_text("x")
        assert main(["gen-data", "--config", str(cfg), "--out", str(out)]) == 2
        assert "--force" in capsys.readouterr().err
        assert main(["gen-data", "--config", str(cfg), "--out", str(out),
                     "--force"]) == 0
        assert not (out / "junk.txt").exists()

    def test_missing_seed_is_config_error(self, tmp_path, capsys):
        bad = CONFIG.replace("seed = 77\n", "")
        cfg = write_config(tmp_path, bad)
        code = main(["gen-data", "--config", str(cfg), "--out",
                     str(tmp_path / "d")])
        assert code == 2
        assert "seed" in capsys.readouterr().err

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path, CONFIG + "\nturbo = yes\n")
        assert main(["gen-data", "--config", str(cfg), "--out",
                     str(tmp_path / "d")]) == 2
        assert "turbo" in capsys.readouterr().err

    def test_manifest_written(self, workspace):
        manifest = (workspace / "data" / "manifest.txt").read_text()
        assert len(manifest.splitlines()) == 6
        assert (workspace / "data" / "config_echo.ini").exists()


class TestTrain:
    def test_artifacts(self, workspace):
        run = workspace / "decaf_run"
        assert (run / "best.ckpt").exists()
        assert (run / "history.csv").read_text().splitlines()[0] == \
            "epoch,train_loss,val_rho,lr"
        assert (run / "history.svg").exists()
        model, header = load_checkpoint(run / "best.ckpt")
        assert header["kind"] == "decaf"

    def test_mtrf_checkpoint_parameter_count(self, workspace):
        model, header = load_checkpoint(workspace / "mtrf_run" / "best.ckpt")
        # 8 channels x 33 lags + bias
        assert model.param_count() == 8 * 33 + 1
        assert (workspace / "mtrf_run" / "lambda_grid.csv").exists()

    def test_corrupt_container_exit_3(self, workspace, tmp_path, capsys):
        cfg = write_config(tmp_path)
        data = tmp_path / "data"
        data.mkdir()
        for p in (workspace / "data").iterdir():
            (data / p.name).write_bytes(p.read_bytes())
        victim = data / "sub00_stim00.eeg.env1"
        victim.write_bytes(victim.read_bytes()[:100])
        code = main(["train", "--config", str(cfg), "--data", str(data),
                     "--model", "mtrf", "--out", str(tmp_path / "run")])
        assert code == 3
        assert "sub00_stim00" in capsys.readouterr().err


class TestEval:
    def test_eval_writes_reports_and_gain(self, workspace, tmp_path):
        out = tmp_path / "eval"
        code = main(["eval",
                     "--checkpoint", str(workspace / "decaf_run" / "best.ckpt"),
                     "--checkpoint", str(workspace / "mtrf_run" / "best.ckpt"),
                     "--data", str(workspace / "data"),
                     "--mode", "recursive", "--out", str(out)])
        assert code == 0
        summary = (out / "summary.csv").read_text().splitlines()
        assert summary[0] == "model,mode,params,rho_mean,rho_std,gain_pct,p_value,cohens_d"
        mtrf_row = next(r for r in summary[1:] if r.startswith("mtrf_run,"))
        assert ",--," in mtrf_row  # baseline gain column is a dash
        decaf_row = next(r for r in summary[1:] if r.startswith("decaf_run,"))
        assert ",--," not in decaf_row.rsplit(",", 2)[0]

    def test_eval_is_deterministic(self, workspace, tmp_path):
        outs = []
        for name in ("e1", "e2"):
            out = tmp_path / name
            assert main(["eval",
                         "--checkpoint", str(workspace / "decaf_run" / "best.ckpt"),
                         "--data", str(workspace / "data"),
                         "--mode", "recursive", "--out", str(out)]) == 0
            outs.append(dir_digest(out))
        assert outs[0] == outs[1]

    def test_unknown_mode_exits_2_listing_modes(self, workspace, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["eval", "--checkpoint",
                  str(workspace / "decaf_run" / "best.ckpt"),
                  "--data", str(workspace / "data"),
                  "--mode", "sideways", "--out", str(tmp_path / "x")])
        assert exc.value.code == 2
        err = capsys.readouterr().err
        for mode in ("recursive", "oracle", "eeg_only", "prior_only"):
            assert mode in err


class TestSweepPsdReport:
    def test_noise_sweep_artifacts(self, workspace, tmp_path):
        out = tmp_path / "sweep"
        code = main(["noise-sweep",
                     "--checkpoint", str(workspace / "decaf_run" / "best.ckpt"),
                     "--data", str(workspace / "data"),
                     "--out", str(out), "--snrs", "0,10", "--seeds", "0"])
        assert code == 0
        text = (out / "sweep.csv").read_text()
        assert text.splitlines()[0] == "model,snr_db,mean_rho,seed0"
        assert "decaf_run:recursive" in text and "decaf_run:eeg_only" in text
        assert (out / "sweep.svg").read_text().startswith("<svg")

    def test_psd_artifacts(self, workspace, tmp_path):
        out = tmp_path / "psd"
        code = main(["psd",
                     "--checkpoint", str(workspace / "decaf_run" / "best.ckpt"),
                     "--data", str(workspace / "data"), "--out", str(out)])
        assert code == 0
        header = (out / "psd.csv").read_text().splitlines()[0]
        assert header == ("freq_hz,ground_truth_db,eeg_branch_db,"
                          "prior_branch_db,fused_db")

    def test_psd_rejects_linear_model(self, workspace, tmp_path):
        code = main(["psd",
                     "--checkpoint", str(workspace / "mtrf_run" / "best.ckpt"),
                     "--data", str(workspace / "data"),
                     "--out", str(tmp_path / "p")])
        assert code == 2

    def test_report_merges_and_computes_gain(self, workspace, tmp_path):
        eval_out = tmp_path / "eval"
        assert main(["eval",
                     "--checkpoint", str(workspace / "decaf_run" / "best.ckpt"),
                     "--checkpoint", str(workspace / "mtrf_run" / "best.ckpt"),
                     "--data", str(workspace / "data"),
                     "--out", str(eval_out)]) == 0
        out = tmp_path / "report"
        code = main(["report",
                     "--eval-csv", str(eval_out / "eval_decaf_run.csv"),
                     "--eval-csv", str(eval_out / "eval_mtrf_run.csv"),
                     "--baseline", "mtrf_run", "--out", str(out)])
        assert code == 0
        report = (out / "report.csv").read_text()
        assert "decaf_run" in report and "mtrf_run" in report

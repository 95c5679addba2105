"""Decode modes, causality, scoring, and paired statistics."""

import numpy as np
import pytest
from scipy import stats as scipy_stats

from decaf.data import Recording
from decaf.errors import ConfigError
from decaf.evaluation import (
    cohens_d,
    decode_recording,
    decode_recordings,
    noise_sweep,
    paired_stats,
    psd_report,
    score_decodes,
    wilcoxon_signed_rank,
)
from decaf.evaluation.metrics import relative_gain_pct
from decaf.models import (
    DecafConfig,
    DecafModel,
    EegEncoderConfig,
    ForecasterConfig,
    MtrfModel,
)
from decaf.dsp import pearson


WIN, CH = 16, 4


def tiny_model(seed=0):
    return DecafModel(DecafConfig(
        seed=seed,
        encoder=EegEncoderConfig(d_model=8, n_layers=1, n_heads=2, ffn_dim=16,
                                 dropout=0.0, n_channels=CH, window_len=WIN),
        forecaster=ForecasterConfig(embed_channels=6, embed_kernel=3, gru_hidden=6,
                                    gru_layers=2, attn_heads=2, head_hidden=10,
                                    window_len=WIN),
    ))


def make_recording(n_windows=5, seed=0, subject="subA", stimulus="stim0"):
    rng = np.random.default_rng(seed)
    t_total = n_windows * WIN + 32
    return Recording(subject, stimulus, rng.standard_normal((t_total, CH)),
                     rng.random(t_total))


def decode(model, rec, mode):
    return decode_recording(model, rec, mode)


class TestDecodeModes:
    def test_eeg_only_equals_encoder_branch(self):
        model = tiny_model()
        rec = make_recording()
        d = decode(model, rec, "eeg_only")
        r = decode(model, rec, "recursive")
        for w_eeg, w_rec in zip(d.windows, r.windows):
            assert np.array_equal(w_eeg.output, w_rec.a_eeg)

    def test_recursive_oracle_agree_at_window_zero_then_diverge(self):
        model = tiny_model(1)
        rec = make_recording(seed=1)
        r = decode(model, rec, "recursive")
        o = decode(model, rec, "oracle")
        assert np.array_equal(r.windows[0].output, o.windows[0].output)
        later_equal = all(np.array_equal(a.output, b.output)
                          for a, b in zip(r.windows[1:], o.windows[1:]))
        assert not later_equal

    def test_prior_only_chains_its_own_forecasts(self):
        model = tiny_model(2)
        rec = make_recording(seed=2)
        d = decode(model, rec, "prior_only")
        # reproduce the chain by hand
        from decaf.numcore import Tensor, no_grad
        ctx = np.zeros(WIN)
        for w in d.windows:
            with no_grad():
                expected = model.forecaster(Tensor(ctx[None, :])).data[0]
            assert np.allclose(w.output, expected, atol=1e-12)
            ctx = expected

    def test_alpha_recorded_only_for_fused_modes(self):
        model = tiny_model(3)
        rec = make_recording(seed=3)
        assert all(w.alpha is not None for w in decode(model, rec, "recursive").windows)
        assert all(w.alpha is not None for w in decode(model, rec, "oracle").windows)
        assert all(w.alpha is None for w in decode(model, rec, "eeg_only").windows)
        assert all(w.alpha is None for w in decode(model, rec, "prior_only").windows)

    def test_unknown_mode_rejected(self):
        with pytest.raises(ConfigError, match="recursive"):
            decode_recordings(tiny_model(), [make_recording()], "banana")

    def test_short_recording_skipped_with_warning(self):
        model = tiny_model()
        rng = np.random.default_rng(4)
        short = Recording("s", "x", rng.standard_normal((WIN, CH)), rng.random(WIN))
        with pytest.warns(UserWarning, match="skipping"):
            out = decode_recordings(model, [short], "recursive")
        assert out == []

    @pytest.mark.parametrize("mode", ["recursive", "oracle", "eeg_only",
                                      "prior_only"])
    def test_future_perturbation_cannot_reach_past_windows(self, mode):
        model = tiny_model(5)
        rec = make_recording(n_windows=5, seed=5)
        base = decode(model, rec, mode)
        # corrupt everything after window 2's span (EEG spans delay further)
        cut = 3 * WIN + 32
        eeg2 = rec.eeg.copy()
        env2 = rec.envelope.copy()
        eeg2[cut:] = 999.0
        env2[cut:] = 0.5
        perturbed = decode(model, Recording("subA", "stim0", eeg2, env2), mode)
        for n in range(3):
            assert np.array_equal(base.windows[n].output,
                                  perturbed.windows[n].output)

    def test_batched_group_decode_matches_single(self):
        model = tiny_model(6)
        recs = [make_recording(seed=10 + i, subject=f"sub{i}") for i in range(3)]
        grouped = decode_recordings(model, recs, "recursive")
        singles = [decode_recording(model, r, "recursive") for r in recs]
        for g, s in zip(grouped, singles):
            for wg, ws in zip(g.windows, s.windows):
                assert np.allclose(wg.output, ws.output, atol=1e-12)

    def test_mtrf_decodes_windowwise(self):
        rng = np.random.default_rng(7)
        m = MtrfModel(rng.standard_normal(33 * CH + 1), 33, CH, 1.0)
        rec = make_recording(seed=7)
        d = decode_recordings(m, [rec], "recursive", win=WIN)[0]
        assert len(d.windows) == 5
        assert np.allclose(d.windows[0].output,
                           m.predict_window(rec.eeg[32:32 + WIN]))


class TestScoring:
    def test_subject_mean_of_window_rhos(self):
        # hand-built decode results with known window correlations
        from decaf.evaluation import DecodedRecording, DecodedWindow
        rng = np.random.default_rng(0)
        base = rng.standard_normal(50)
        windows = []
        for target_rho in (0.1, 0.2, 0.3):
            y = rng.standard_normal(50)
            # mix to reach an approximate correlation, then measure exactly
            x = target_rho * y + np.sqrt(1 - target_rho ** 2) * rng.standard_normal(50)
            windows.append(DecodedWindow(x, y, 0))
        d = DecodedRecording("subA", "stim0", "recursive", windows)
        report = score_decodes([d])
        expected = np.mean([pearson(w.output, w.target) for w in windows])
        assert report.per_subject[0].rho == pytest.approx(expected)
        assert report.mean_rho == pytest.approx(expected)
        assert report.std_rho == 0.0

    def test_independent_reimplementation_agreement(self):
        model = tiny_model(8)
        recs = [make_recording(seed=20 + i, subject=f"sub{i}") for i in range(3)]
        decoded = decode_recordings(model, recs, "eeg_only")
        report = score_decodes(decoded)

        # straightforward reimplementation of the metric
        per_subject = {}
        for rec, d in zip(recs, decoded):
            rhos = [pearson(w.output, w.target) for w in d.windows]
            per_subject.setdefault(rec.subject_id, []).extend(rhos)
        means = [float(np.mean(v)) for _, v in sorted(per_subject.items())]
        assert report.mean_rho == pytest.approx(float(np.mean(means)), abs=1e-12)
        assert report.std_rho == pytest.approx(float(np.std(means, ddof=1)),
                                               abs=1e-12)

    def test_relative_gain_formula(self):
        assert relative_gain_pct(0.170, 0.106) == pytest.approx(60.4, abs=0.05)


class TestPairedStats:
    def test_cohens_d_hand_case(self):
        assert cohens_d([1.0, 2.0, 3.0]) == pytest.approx(2.0)

    def test_all_positive_n5_exact(self):
        p, d = paired_stats([1.0, 2.0, 3.0, 4.0, 5.0], [0.5, 1.5, 2.5, 3.5, 4.5])
        assert p == pytest.approx(0.0625)

    def test_identical_scores_conventions(self):
        p, d = paired_stats([0.1] * 6, [0.1] * 6)
        assert p == 1.0 and d == 0.0

    def test_matches_scipy_exact(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            diffs = rng.standard_normal(rng.integers(5, 20))
            ref = scipy_stats.wilcoxon(diffs, mode="exact",
                                       zero_method="wilcox").pvalue
            assert wilcoxon_signed_rank(diffs) == pytest.approx(ref, rel=1e-10)

    def test_matches_scipy_normal_approx(self):
        rng = np.random.default_rng(2)
        diffs = rng.standard_normal(60)
        ref = scipy_stats.wilcoxon(diffs, mode="approx", correction=True,
                                   zero_method="wilcox").pvalue
        assert wilcoxon_signed_rank(diffs) == pytest.approx(ref, rel=1e-6)

    def test_length_and_size_contracts(self):
        with pytest.raises(ValueError):
            paired_stats([1, 2, 3], [1, 2])
        with pytest.raises(ValueError):
            paired_stats([1, 2, 3, 4], [0, 0, 0, 0])


class TestSweepAndPsd:
    def test_noise_sweep_structure_and_determinism(self):
        model = tiny_model(9)
        recs = [make_recording(seed=30 + i, subject=f"sub{i}") for i in range(2)]
        models = {"decaf": (model, "recursive"), "eeg": (model, "eeg_only")}
        a = noise_sweep(models, recs, snr_grid=(0.0, 10.0), noise_seeds=(0, 1))
        b = noise_sweep(models, recs, snr_grid=(0.0, 10.0), noise_seeds=(0, 1))
        assert a.mean_rho == b.mean_rho
        assert set(a.mean_rho) == {("decaf", 0.0), ("decaf", 10.0),
                                   ("eeg", 0.0), ("eeg", 10.0)}
        assert len(a.curve("decaf")) == 2

    def test_psd_report_shared_grid(self):
        model = tiny_model(10)
        recs = [make_recording(n_windows=40, seed=40)]
        psds = psd_report(model, recs, nperseg=64, noverlap=32)
        freqs = psds["ground_truth"].freqs_hz
        for est in psds.values():
            assert np.array_equal(est.freqs_hz, freqs)
            assert est.power.shape == freqs.shape

"""Causal streaming inference over whole recordings.

Modes:
  recursive  - window n's context is the model's own fused output for n-1
  oracle     - window n's context is the ground-truth previous window
  eeg_only   - EEG branch alone; fusion bypassed
  prior_only - forecaster alone, chained on its own previous forecasts

All modes use a zero context for window 0, so recursive and oracle agree
there and may diverge from window 1 on. Decoding is strictly sequential in
time within a recording; nothing after window n can influence window n.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..numcore import Tensor, no_grad
from ..models import MtrfModel
from ..data import WINDOW_LEN, make_eval_sequence

MODES = ("recursive", "oracle", "eeg_only", "prior_only")
_ENCODER_CHUNK = 32  # windows per encoder batch (bounds attention memory)


def model_window_len(model) -> int:
    if hasattr(model, "encoder"):
        return model.encoder.cfg.window_len
    return WINDOW_LEN


@dataclass
class DecodedWindow:
    output: np.ndarray  # [T]
    target: np.ndarray  # [T]
    start: int
    a_eeg: np.ndarray = None
    a_prior: np.ndarray = None
    alpha: np.ndarray = None


@dataclass
class DecodedRecording:
    subject_id: str
    stimulus_id: str
    mode: str
    windows: list = field(default_factory=list)

    def concat(self, attr: str = "output") -> np.ndarray:
        return np.concatenate([getattr(w, attr) for w in self.windows])


def _encode_all(model, eeg_windows: np.ndarray) -> np.ndarray:
    """Run the EEG branch over [N, T, C] stacked windows in bounded chunks."""
    outs = []
    for i in range(0, eeg_windows.shape[0], _ENCODER_CHUNK):
        outs.append(model.encoder(Tensor(eeg_windows[i:i + _ENCODER_CHUNK])).data)
    return np.concatenate(outs, axis=0)


def decode_recordings(model, recordings, mode: str = "recursive", win: int = None):
    """Decode several recordings; same-length recordings run in lockstep.

    Returns DecodedRecording per input (short recordings are skipped with a
    warning). For an encoder-only or linear model, every mode reduces to the
    model's direct window estimate. ``win`` overrides the window length
    (defaults to the model's own, or the protocol's 192).
    """
    if mode not in MODES:
        raise ConfigError(f"unknown decode mode {mode!r}; valid: {', '.join(MODES)}")

    if win is None:
        win = model_window_len(model)
    sequences = {}
    for rec in recordings:
        try:
            sequences[id(rec)] = make_eval_sequence(rec, win=win)
        except ValueError:
            warnings.warn(
                f"skipping recording {rec.subject_id}/{rec.stimulus_id}: "
                f"shorter than one window"
            )
    usable = [r for r in recordings if id(r) in sequences]

    results = {}
    groups = {}
    for rec in usable:
        groups.setdefault(len(sequences[id(rec)]), []).append(rec)
    for n_windows, group in groups.items():
        decoded = _decode_group(model, group,
                                [sequences[id(r)] for r in group], mode)
        for rec, d in zip(group, decoded):
            results[id(rec)] = d
    return [results[id(r)] for r in usable]


def decode_recording(model, rec, mode: str = "recursive", win: int = None):
    out = decode_recordings(model, [rec], mode, win=win)
    return out[0] if out else None


def _decode_group(model, recs, seqs, mode):
    n_rec = len(recs)
    n_win = len(seqs[0])
    win_len = seqs[0][0].target.shape[0]

    if isinstance(model, MtrfModel):
        return [
            DecodedRecording(r.subject_id, r.stimulus_id, mode, [
                DecodedWindow(model.predict_window(p.eeg), np.asarray(p.target),
                              p.start)
                for p in seq
            ])
            for r, seq in zip(recs, seqs)
        ]

    with no_grad():
        # the EEG branch never sees context, so it can run batched up front
        stacked = np.stack([p.eeg for seq in seqs for p in seq])
        a_eeg_all = _encode_all(model, stacked).reshape(n_rec, n_win, win_len)

        out = [DecodedRecording(r.subject_id, r.stimulus_id, mode) for r in recs]
        if mode == "eeg_only" or not hasattr(model, "forecaster"):
            for i, seq in enumerate(seqs):
                for n, pair in enumerate(seq):
                    out[i].windows.append(DecodedWindow(
                        a_eeg_all[i, n], np.asarray(pair.target), pair.start,
                        a_eeg=a_eeg_all[i, n]))
            return out

        context = np.zeros((n_rec, win_len))
        for n in range(n_win):
            a_prior = model.forecaster(Tensor(context)).data
            a_eeg = a_eeg_all[:, n]
            if mode == "prior_only":
                outputs, alpha = a_prior, None
                context = a_prior
            else:
                alpha = model.gate(Tensor(a_eeg), Tensor(a_prior)).data
                outputs = alpha * a_eeg + (1.0 - alpha) * a_prior
                if mode == "recursive":
                    context = outputs
                else:  # oracle: ground-truth previous window
                    context = np.stack([np.asarray(seq[n].target) for seq in seqs])
            for i, seq in enumerate(seqs):
                out[i].windows.append(DecodedWindow(
                    outputs[i], np.asarray(seq[n].target), seq[n].start,
                    a_eeg=a_eeg[i], a_prior=a_prior[i],
                    alpha=None if alpha is None else alpha[i]))
    return out

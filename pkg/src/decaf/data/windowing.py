"""Window pairing: EEG window, target envelope window, previous-window context.

The EEG window trails the envelope window by ``delay`` samples (the cortical
response follows the stimulus), so a recording's usable length is
``n_samples - delay``. Contexts are the immediately preceding ``win`` samples
of envelope, zero-padded on the left for starts earlier than one full window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dsp import window_slices
from .container import Recording

WINDOW_LEN = 192  # 3 s at 64 Hz
TRAIN_HOP = 38  # floor of 20% of 192 (80% overlap)
EEG_DELAY = 32  # 500 ms at 64 Hz


def train_hop_for(win: int) -> int:
    """80% overlap, floored to whole samples (38 at the protocol's win=192)."""
    return max(1, int(win * 0.2))


@dataclass
class WindowPair:
    """One training/eval sample; arrays are views into the recording."""

    eeg: np.ndarray  # [win, C], starts at start + delay
    target: np.ndarray  # [win]
    context: np.ndarray  # [win], envelope[start - win : start], zero-padded
    is_first_window: bool
    recording: Recording
    start: int  # target start index into the envelope
    delay: int  # EEG window offset relative to the target window


def _context_for(rec: Recording, start: int, win: int) -> np.ndarray:
    if start >= win:
        return rec.envelope[start - win:start]
    ctx = np.zeros(win)
    if start > 0:
        ctx[win - start:] = rec.envelope[:start]
    return ctx


def _make_windows(rec: Recording, win: int, hop: int, delay: int):
    usable = rec.n_samples - delay
    if usable < win:
        raise ValueError(
            f"recording {rec.subject_id}/{rec.stimulus_id} too short: "
            f"{rec.n_samples} samples < window {win} + delay {delay}"
        )
    pairs = []
    for s in window_slices(usable, win, hop).starts:
        pairs.append(WindowPair(
            eeg=rec.eeg[s + delay:s + delay + win],
            target=rec.envelope[s:s + win],
            context=_context_for(rec, s, win),
            is_first_window=s < win,
            recording=rec,
            start=s,
            delay=delay,
        ))
    return pairs


def make_training_windows(rec: Recording, win: int = WINDOW_LEN, hop: int = TRAIN_HOP,
                          delay: int = EEG_DELAY):
    """Overlapping training pairs (default 80% overlap, floored to hop 38)."""
    return _make_windows(rec, win, hop, delay)


def make_eval_sequence(rec: Recording, win: int = WINDOW_LEN, delay: int = EEG_DELAY):
    """Contiguous non-overlapping pairs; window n's context range is window
    n-1's target range, so recursive decoding can chain its own outputs."""
    return _make_windows(rec, win, win, delay)

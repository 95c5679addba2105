"""Training protocol: seeded shuffled mini-batches, Adam with a pluggable
learning-rate schedule, context regimes for the recursive decoder, early
stopping on validation correlation, best-checkpoint restoration.

Context regimes:
  teacher_forcing     - context is the ground-truth previous window
  scheduled_sampling  - ground truth is swapped for the model's own previous
                        window estimate with probability ramping linearly
                        from 0 (first epoch) to p_end (final epoch); the
                        substitute is computed one step back with no gradient
                        flow across the window boundary
  oracle              - trains exactly like teacher forcing; the difference
                        is that validation/evaluation also feed ground-truth
                        context (the upper-bound variant)
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from ..data import make_training_windows
from ..data.windowing import _context_for, train_hop_for
from ..errors import ConfigError, NumericsError
from ..evaluation import decode_recordings, score_decodes
from ..evaluation.decode import model_window_len
from ..models import mtrf_fit
from ..models.mtrf import DEFAULT_LAMBDA_GRID
from ..numcore import Adam, NoamSchedule, StaticSchedule, Tensor, clip_grad_norm, \
    no_grad, parse_schedule
from .loss import LossWeights, hybrid_loss

REGIMES = ("teacher_forcing", "scheduled_sampling", "oracle")


@dataclass
class TrainConfig:
    epochs: int = 10
    batch_size: int = 64
    patience: int = 3
    schedule: str = "auto"  # auto | static:<rate> | noam:<d_model>:<warmup>
    context_regime: str = "teacher_forcing"
    ss_p_end: float = 0.5
    seed: int = 0
    shuffle: bool = True
    grad_clip: float = 5.0
    loss: LossWeights = field(default_factory=LossWeights)

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if not 0 < self.patience < self.epochs:
            raise ConfigError(
                f"need 0 < patience < epochs, got patience={self.patience}, "
                f"epochs={self.epochs}"
            )
        if self.context_regime not in REGIMES:
            raise ConfigError(
                f"unknown context regime {self.context_regime!r}; "
                f"valid: {', '.join(REGIMES)}"
            )


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_rho: float
    lr: float


@dataclass
class TrainHistory:
    epochs: list = field(default_factory=list)
    best_epoch: int = 0
    best_val_rho: float = float("-inf")
    stopped_early: bool = False


def resolve_schedule(cfg: TrainConfig, model):
    """The protocol default: Noam for transformer-containing models, a static
    1e-3 rate otherwise; explicit config strings override."""
    if cfg.schedule != "auto":
        return parse_schedule(cfg.schedule)
    if hasattr(model, "encoder"):
        return NoamSchedule(model.encoder.cfg.d_model)
    return StaticSchedule(1e-3)


def sampling_probability(epoch: int, epochs: int, p_end: float) -> float:
    """Linear ramp: exactly 0 at epoch 1 and exactly p_end at the last epoch."""
    if epochs <= 1:
        return p_end
    return p_end * (epoch - 1) / (epochs - 1)


def _rng(*entropy) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(entropy))))


def _batch_arrays(pairs):
    eeg = np.stack([p.eeg for p in pairs])
    ctx = np.stack([p.context for p in pairs])
    tgt = np.stack([p.target for p in pairs])
    return eeg, ctx, tgt


def _scheduled_contexts(model, pairs, ctx, p_swap, rng):
    """Swap ground-truth contexts for the model's own previous-window output.

    The previous window's estimate is computed teacher-forced one step back
    (its own context is ground truth) under no_grad, so no gradient crosses
    the window boundary. Windows too early to have a full previous window
    keep their padded ground-truth context.
    """
    win = ctx.shape[1]
    picked = [i for i, p in enumerate(pairs)
              if p.start >= win and rng.random() < p_swap]
    if not picked:
        return ctx
    prev_eeg, prev_ctx = [], []
    for i in picked:
        p = pairs[i]
        s_prev = p.start - win
        prev_eeg.append(p.recording.eeg[s_prev + p.delay:s_prev + p.delay + win])
        prev_ctx.append(_context_for(p.recording, s_prev, win))
    with no_grad():
        prev_out = model(Tensor(np.stack(prev_eeg)), Tensor(np.stack(prev_ctx)))[0]
    ctx = ctx.copy()
    for j, i in enumerate(picked):
        ctx[i] = prev_out.data[j]
    return ctx


def _param_norm_report(model) -> str:
    parts = []
    for name, p in list(model.named_parameters())[:8]:
        parts.append(f"{name}: |w|={np.linalg.norm(p.data):.3g}")
    return "; ".join(parts)


def validation_mode(regime: str) -> str:
    return "oracle" if regime == "oracle" else "recursive"


def train(model, split, cfg: TrainConfig, history_hook=None) -> TrainHistory:
    """Fit the model on split.train, early-stop on split.valid, restore the
    best-epoch parameters in place. Returns the history."""
    if not split.train or not split.valid:
        raise ConfigError("training needs non-empty train and valid splits")
    win = model_window_len(model)
    pairs = [p for rec in split.train
             for p in make_training_windows(rec, win=win, hop=train_hop_for(win))]
    if not pairs:
        raise ConfigError("no training windows could be built")

    schedule = resolve_schedule(cfg, model)
    adam = Adam(model.parameters())
    history = TrainHistory()
    best_state = None
    stale = 0
    step = 0

    for epoch in range(1, cfg.epochs + 1):
        order = np.arange(len(pairs))
        if cfg.shuffle:
            _rng(cfg.seed, 10, epoch).shuffle(order)
        dropout_rng = _rng(cfg.seed, 20, epoch)
        sampling_rng = _rng(cfg.seed, 30, epoch)
        p_swap = (sampling_probability(epoch, cfg.epochs, cfg.ss_p_end)
                  if cfg.context_regime == "scheduled_sampling" else 0.0)

        losses = []
        lr = schedule.rate(max(step, 1))
        for lo in range(0, len(order), cfg.batch_size):
            batch = [pairs[i] for i in order[lo:lo + cfg.batch_size]]
            eeg, ctx, tgt = _batch_arrays(batch)
            if p_swap > 0.0:
                ctx = _scheduled_contexts(model, batch, ctx, p_swap, sampling_rng)
            model.zero_grad()
            out = model(Tensor(eeg), Tensor(ctx), train=True, rng=dropout_rng)
            pred = out[0] if isinstance(out, tuple) else out
            loss = hybrid_loss(pred, tgt, cfg.loss)
            value = float(loss.data)
            if not np.isfinite(value):
                raise NumericsError(
                    f"non-finite loss at epoch {epoch}, batch {lo // cfg.batch_size}"
                    f" ({_param_norm_report(model)})"
                )
            loss.backward()
            clip_grad_norm(model.parameters(), cfg.grad_clip)
            step += 1
            lr = schedule.rate(step)
            adam.step(lr)
            losses.append(value)

        val_reports = decode_recordings(model, split.valid,
                                        validation_mode(cfg.context_regime))
        val_rho = score_decodes(val_reports).mean_rho
        stats = EpochStats(epoch, float(np.mean(losses)), val_rho, lr)
        history.epochs.append(stats)
        if history_hook is not None:
            history_hook(stats)

        if val_rho > history.best_val_rho:
            history.best_val_rho = val_rho
            history.best_epoch = epoch
            best_state = {name: p.data.copy()
                          for name, p in model.named_parameters()}
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                history.stopped_early = True
                break

    for name, p in model.named_parameters():
        p.data = best_state[name]
    return history


def train_baseline_mtrf(split, lambdas=DEFAULT_LAMBDA_GRID, win: int = None):
    """Ridge baseline under the same window protocol and delay."""
    from ..data import WINDOW_LEN

    if not split.train:
        raise ConfigError("mtrf training needs a non-empty train split")
    win = WINDOW_LEN if win is None else win
    hop = train_hop_for(win)
    train_pairs = [p for rec in split.train
                   for p in make_training_windows(rec, win=win, hop=hop)]
    val_pairs = [p for rec in split.valid
                 for p in make_training_windows(rec, win=win, hop=hop)]
    return mtrf_fit(train_pairs, val_pairs or None, lambdas=lambdas)

"""Hybrid objective: L1 for scale plus negative Pearson for shape.

The correlation term is computed per window and averaged over the batch. Its
denominators use sqrt(variance + eps^2) rather than (std + eps): the two
agree to ~1e-7 for any non-degenerate window, but the former keeps the
gradient finite when a window is exactly constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from ..numcore import Tensor


@dataclass
class LossWeights:
    l1: float = 1.0
    pearson: float = 0.2

    def __post_init__(self):
        if self.l1 < 0 or self.pearson < 0:
            raise ValueError("loss weights must be >= 0")


def batch_pearson(pred: Tensor, target: np.ndarray, eps: float = 1e-8) -> Tensor:
    """Per-window correlation of [B, T] predictions against constant targets."""
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeError(f"pearson: prediction {pred.shape} vs target {target.shape}")
    xm = pred - pred.mean(axis=-1, keepdims=True)
    ym = target - target.mean(axis=-1, keepdims=True)
    num = (xm * ym).mean(axis=-1)
    sx = ((xm * xm).mean(axis=-1) + eps * eps).sqrt()
    sy = np.sqrt((ym * ym).mean(axis=-1) + eps * eps)
    return num / (sx * Tensor(sy))


def hybrid_loss(pred: Tensor, target: np.ndarray,
                weights: LossWeights = LossWeights()) -> Tensor:
    """Mean over the batch of l1 * mean|pred - target| - pearson * rho(window)."""
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeError(f"loss: prediction {pred.shape} vs target {target.shape}")
    if pred.ndim == 1:
        pred = pred.reshape(1, *pred.shape)
        target = target[None]
    mae = (pred - Tensor(target)).abs().mean()
    rho = batch_pearson(pred, target).mean()
    return weights.l1 * mae - weights.pearson * rho

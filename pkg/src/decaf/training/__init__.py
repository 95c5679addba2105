"""Hybrid loss and the training protocol."""

from .loss import LossWeights, batch_pearson, hybrid_loss
from .trainer import (
    REGIMES,
    EpochStats,
    TrainConfig,
    TrainHistory,
    resolve_schedule,
    sampling_probability,
    train,
    train_baseline_mtrf,
    validation_mode,
)

__all__ = [
    "EpochStats",
    "LossWeights",
    "REGIMES",
    "TrainConfig",
    "TrainHistory",
    "batch_pearson",
    "hybrid_loss",
    "resolve_schedule",
    "sampling_probability",
    "train",
    "train_baseline_mtrf",
    "validation_mode",
]

"""Learned convex gate blending the two branch estimates per time step."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from ..numcore import Conv1d, Module, Tensor, concat


@dataclass
class FusionGateConfig:
    channels: tuple = (2, 16, 8, 1)
    kernels: tuple = (5, 3, 1)


class FusionGate(Module):
    def __init__(self, cfg: FusionGateConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.convs = [
            Conv1d(cin, cout, k, rng, padding="same")
            for cin, cout, k in zip(cfg.channels, cfg.channels[1:], cfg.kernels)
        ]

    def __call__(self, a_eeg: Tensor, a_prior: Tensor) -> Tensor:
        """Two [.., T] estimates -> gate weights in (0, 1)^T."""
        if a_eeg.shape != a_prior.shape:
            raise ShapeError(
                f"gate inputs must match, got {a_eeg.shape} vs {a_prior.shape}"
            )
        x = concat([a_eeg.reshape(*a_eeg.shape, 1),
                    a_prior.reshape(*a_prior.shape, 1)], axis=-1)
        for conv in self.convs[:-1]:
            x = conv(x).relu()
        x = self.convs[-1](x).sigmoid()
        return x.reshape(*x.shape[:-1])


def fuse(a_eeg: Tensor, a_prior: Tensor, alpha: Tensor) -> Tensor:
    """Pointwise convex combination alpha * a_eeg + (1 - alpha) * a_prior."""
    return alpha * a_eeg + (1.0 - alpha) * a_prior

"""EEG-to-envelope branch: pre-norm transformer encoder over one EEG window.

Maps [T, C] (or [B, T, C]) EEG to a length-T envelope estimate from that
window alone; it never sees the envelope context, so this branch is the
"observation" side of the fused model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from ..numcore import (
    LayerNorm,
    Linear,
    Module,
    Tensor,
    TransformerBlock,
    sinusoidal_positions,
)


@dataclass
class EegEncoderConfig:
    d_model: int = 256
    n_layers: int = 8
    n_heads: int = 8
    ffn_dim: int = 2048
    dropout: float = 0.1
    n_channels: int = 64
    window_len: int = 192

    def __post_init__(self):
        if self.d_model % self.n_heads:
            raise ValueError(
                f"d_model={self.d_model} must be divisible by n_heads={self.n_heads}"
            )


class EegEncoder(Module):
    def __init__(self, cfg: EegEncoderConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.input_proj = Linear(cfg.n_channels, cfg.d_model, rng)
        self.blocks = [
            TransformerBlock(cfg.d_model, cfg.n_heads, cfg.ffn_dim, rng,
                             dropout_p=cfg.dropout)
            for _ in range(cfg.n_layers)
        ]
        self.final_norm = LayerNorm(cfg.d_model)
        self.output_proj = Linear(cfg.d_model, 1, rng)
        self._positions = sinusoidal_positions(cfg.window_len, cfg.d_model)

    def __call__(self, eeg: Tensor, train: bool = False, rng=None) -> Tensor:
        cfg = self.cfg
        if eeg.shape[-2:] != (cfg.window_len, cfg.n_channels):
            raise ShapeError(
                f"encoder expects [.., {cfg.window_len}, {cfg.n_channels}], "
                f"got {eeg.shape}"
            )
        x = self.input_proj(eeg) + Tensor(self._positions)
        for block in self.blocks:
            x = block(x, train=train, rng=rng)
        out = self.output_proj(self.final_norm(x))  # [.., T, 1]
        return out.reshape(*out.shape[:-1])

"""Temporal-prior branch: forecasts the current envelope window from the
previous one. Conv embedding, 2-layer GRU, causally-masked self-attention,
then a per-step feed-forward head; depends only on the context, never on EEG."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from ..numcore import GRU, Conv1d, Linear, Module, MultiheadAttention, Tensor


@dataclass
class ForecasterConfig:
    embed_channels: int = 128
    embed_kernel: int = 7
    gru_hidden: int = 128
    gru_layers: int = 2
    attn_heads: int = 4
    head_hidden: int = 256
    window_len: int = 192


class Forecaster(Module):
    def __init__(self, cfg: ForecasterConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.embed = Conv1d(1, cfg.embed_channels, cfg.embed_kernel, rng,
                            padding="same")
        self.gru = GRU(cfg.embed_channels, cfg.gru_hidden, cfg.gru_layers, rng)
        self.attn = MultiheadAttention(cfg.gru_hidden, cfg.attn_heads, rng)
        self.head_in = Linear(cfg.gru_hidden, cfg.head_hidden, rng)
        self.head_out = Linear(cfg.head_hidden, 1, rng)

    def __call__(self, context: Tensor) -> Tensor:
        """[.., T] previous-window envelope -> [.., T] forecast."""
        if context.shape[-1] != self.cfg.window_len:
            raise ShapeError(
                f"forecaster expects context length {self.cfg.window_len}, "
                f"got {context.shape}"
            )
        x = context.reshape(*context.shape, 1)
        x = self.embed(x)
        x, _ = self.gru(x)
        x = self.attn(x, x, x, causal=True)
        out = self.head_out(self.head_in(x).relu())  # [.., T, 1]
        return out.reshape(*out.shape[:-1])

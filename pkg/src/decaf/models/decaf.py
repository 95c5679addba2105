"""The fused decoder: EEG branch + forecaster branch + convex gate.

Branch independence is architectural: the EEG estimate is a function of the
EEG window only, the prior of the context only. ``forward`` exposes every
intermediate so branch-level ablations and spectra need no model surgery.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..numcore import Module, Tensor
from .encoder import EegEncoder, EegEncoderConfig
from .forecaster import Forecaster, ForecasterConfig
from .fusion import FusionGate, FusionGateConfig, fuse


def _rng(*entropy) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(entropy))))


@dataclass
class DecafConfig:
    seed: int
    encoder: EegEncoderConfig = field(default_factory=EegEncoderConfig)
    forecaster: ForecasterConfig = field(default_factory=ForecasterConfig)
    gate: FusionGateConfig = field(default_factory=FusionGateConfig)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "DecafConfig":
        return cls(
            seed=d["seed"],
            encoder=EegEncoderConfig(**d["encoder"]),
            forecaster=ForecasterConfig(**d["forecaster"]),
            gate=FusionGateConfig(channels=tuple(d["gate"]["channels"]),
                                  kernels=tuple(d["gate"]["kernels"])),
        )


class DecafModel(Module):
    kind = "decaf"

    def __init__(self, config: DecafConfig):
        self.config = config
        self.encoder = EegEncoder(config.encoder, _rng(config.seed, 0))
        self.forecaster = Forecaster(config.forecaster, _rng(config.seed, 1))
        self.gate = FusionGate(config.gate, _rng(config.seed, 2))

    def forward(self, eeg: Tensor, context: Tensor, train: bool = False, rng=None):
        """-> (fused, alpha, a_eeg, a_prior), each [.., T]."""
        a_eeg = self.encoder(eeg, train=train, rng=rng)
        a_prior = self.forecaster(context)
        alpha = self.gate(a_eeg, a_prior)
        return fuse(a_eeg, a_prior, alpha), alpha, a_eeg, a_prior

    __call__ = forward


@dataclass
class EncoderOnlyConfig:
    seed: int
    encoder: EegEncoderConfig = field(default_factory=EegEncoderConfig)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "EncoderOnlyConfig":
        return cls(seed=d["seed"], encoder=EegEncoderConfig(**d["encoder"]))


class EncoderOnlyModel(Module):
    """EEG branch trained on its own (static baseline / branch ablation)."""

    kind = "eeg_only"

    def __init__(self, config: EncoderOnlyConfig):
        self.config = config
        self.encoder = EegEncoder(config.encoder, _rng(config.seed, 0))

    def forward(self, eeg: Tensor, context=None, train: bool = False, rng=None):
        """-> (estimate, None, estimate, None); context is accepted and ignored."""
        a_eeg = self.encoder(eeg, train=train, rng=rng)
        return a_eeg, None, a_eeg, None

    __call__ = forward


def toy_encoder_config(**overrides) -> EegEncoderConfig:
    """Desk-scale encoder (d_model 64, 2 layers) for tests and the synthetic
    benchmark; full-size defaults stay on EegEncoderConfig itself."""
    base = dict(d_model=64, n_layers=2, n_heads=2, ffn_dim=256, dropout=0.1)
    base.update(overrides)
    return EegEncoderConfig(**base)


def toy_forecaster_config(**overrides) -> ForecasterConfig:
    base = dict(embed_channels=64, gru_hidden=64, gru_layers=2, attn_heads=2,
                head_hidden=128)
    base.update(overrides)
    return ForecasterConfig(**base)


def toy_decaf_config(seed: int, **encoder_overrides) -> DecafConfig:
    return DecafConfig(
        seed=seed,
        encoder=toy_encoder_config(**encoder_overrides),
        forecaster=toy_forecaster_config(),
    )

"""Decoding models: linear ridge baseline and the fused dynamic decoder."""

from .checkpoint import load_checkpoint, save_checkpoint
from .decaf import (
    DecafConfig,
    DecafModel,
    EncoderOnlyConfig,
    EncoderOnlyModel,
    toy_decaf_config,
    toy_encoder_config,
    toy_forecaster_config,
)
from .encoder import EegEncoder, EegEncoderConfig
from .forecaster import Forecaster, ForecasterConfig
from .fusion import FusionGate, FusionGateConfig, fuse
from .mtrf import DEFAULT_LAMBDA_GRID, N_LAGS, MtrfModel, lagged_design, mtrf_fit

__all__ = [
    "DEFAULT_LAMBDA_GRID",
    "DecafConfig",
    "DecafModel",
    "EegEncoder",
    "EegEncoderConfig",
    "EncoderOnlyConfig",
    "EncoderOnlyModel",
    "Forecaster",
    "ForecasterConfig",
    "FusionGate",
    "FusionGateConfig",
    "MtrfModel",
    "N_LAGS",
    "fuse",
    "lagged_design",
    "load_checkpoint",
    "mtrf_fit",
    "save_checkpoint",
    "toy_decaf_config",
    "toy_encoder_config",
    "toy_forecaster_config",
]

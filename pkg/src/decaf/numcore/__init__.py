"""Minimal dense-tensor library with reverse-mode autodiff and optimizers.

Seeding policy: all randomness in this package flows through
``numpy.random.Generator`` backed by the PCG64 bit generator, with child
streams derived via ``numpy.random.SeedSequence`` from explicit integer
entropy, so every stream is reproducible bit-exactly from a seed.
"""

from .gradcheck import check_gradients, max_rel_error, numerical_grad
from .nn import (
    GRU,
    Conv1d,
    FeedForward,
    LayerNorm,
    Linear,
    Module,
    MultiheadAttention,
    TransformerBlock,
    sinusoidal_positions,
    uniform_param,
    zeros_param,
)
from .optim import Adam, NoamSchedule, StaticSchedule, clip_grad_norm, parse_schedule
from .tensor import Tensor, concat, conv1d, dropout, layer_norm, no_grad, softmax

__all__ = [
    "Adam",
    "Conv1d",
    "FeedForward",
    "GRU",
    "LayerNorm",
    "Linear",
    "Module",
    "MultiheadAttention",
    "NoamSchedule",
    "StaticSchedule",
    "Tensor",
    "TransformerBlock",
    "check_gradients",
    "clip_grad_norm",
    "concat",
    "conv1d",
    "dropout",
    "layer_norm",
    "max_rel_error",
    "no_grad",
    "numerical_grad",
    "parse_schedule",
    "sinusoidal_positions",
    "softmax",
    "uniform_param",
    "zeros_param",
]

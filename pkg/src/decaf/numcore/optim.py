"""Adam optimizer and learning-rate schedules."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, ShapeError


class Adam:
    """Bias-corrected Adam. Moment buffers are allocated per parameter on
    construction; ``step`` consumes each parameter's ``.grad`` in place.
    A parameter whose grad is None this step is left untouched."""

    def __init__(self, params, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.params = list(params)
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def step(self, lr: float):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        c1 = 1.0 - b1 ** self.t
        c2 = 1.0 - b2 ** self.t
        for p, m, v in zip(self.params, self.m, self.v):
            if p.grad is None:
                continue
            if p.grad.shape != p.data.shape:
                raise ShapeError(
                    f"adam: grad shape {p.grad.shape} != param shape {p.data.shape}"
                )
            g = p.grad
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p.data -= lr * (m / c1) / (np.sqrt(v / c2) + self.eps)

    def zero_grad(self):
        for p in self.params:
            p.zero_grad()


def clip_grad_norm(params, max_norm: float) -> float:
    """Scale all gradients so their global L2 norm is at most ``max_norm``."""
    total = 0.0
    for p in params:
        if p.grad is not None:
            total += float(np.sum(p.grad * p.grad))
    norm = float(np.sqrt(total))
    if norm > max_norm and norm > 0.0:
        scale = max_norm / norm
        for p in params:
            if p.grad is not None:
                p.grad *= scale
    return norm


class StaticSchedule:
    """Constant learning rate."""

    def __init__(self, rate: float):
        if rate <= 0:
            raise ConfigError(f"learning rate must be positive, got {rate}")
        self.rate_value = rate

    def rate(self, step: int) -> float:
        if step < 1:
            raise ConfigError(f"schedule step must be >= 1, got {step}")
        return self.rate_value

    def describe(self) -> str:
        return f"static:{self.rate_value:g}"


class NoamSchedule:
    """Warmup-then-decay rate: d_model^-0.5 * min(step^-0.5, step * warmup^-1.5)."""

    def __init__(self, d_model: int, warmup: int = 4000):
        if d_model < 1 or warmup < 1:
            raise ConfigError(f"noam schedule needs d_model, warmup >= 1, "
                              f"got {d_model}, {warmup}")
        self.d_model = d_model
        self.warmup = warmup

    def rate(self, step: int) -> float:
        if step < 1:
            raise ConfigError(f"schedule step must be >= 1, got {step}")
        return self.d_model ** -0.5 * min(step ** -0.5, step * self.warmup ** -1.5)

    def describe(self) -> str:
        return f"noam:{self.d_model}:{self.warmup}"


def parse_schedule(text: str):
    """Parse ``static:<rate>`` or ``noam:<d_model>:<warmup>``."""
    parts = text.strip().split(":")
    try:
        if parts[0] == "static" and len(parts) == 2:
            return StaticSchedule(float(parts[1]))
        if parts[0] == "noam" and len(parts) == 3:
            return NoamSchedule(int(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise ConfigError(f"bad schedule spec {text!r}: {exc}") from None
    raise ConfigError(
        f"bad schedule spec {text!r}; expected static:<rate> or noam:<d_model>:<warmup>"
    )

"""Finite-difference gradient checking.

The numerical side never touches the autodiff graph: it re-evaluates the
forward function under ``no_grad`` with elementwise central differences,
so it is an independent oracle for every backward rule.
"""

from __future__ import annotations

import numpy as np

from .tensor import Tensor, no_grad


def numerical_grad(f, x: Tensor, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of scalar ``f()`` w.r.t. ``x`` (in-place perturbation)."""
    g = np.zeros_like(x.data)
    flat = x.data.reshape(-1)
    gflat = g.reshape(-1)
    with no_grad():
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            fp = float(f().data)
            flat[i] = orig - h
            fm = float(f().data)
            flat[i] = orig
            gflat[i] = (fp - fm) / (2.0 * h)
    return g


def max_rel_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Elementwise |a - n| / max(1, |a|, |n|), reduced to the worst case."""
    denom = np.maximum(1.0, np.maximum(np.abs(analytic), np.abs(numeric)))
    return float(np.max(np.abs(analytic - numeric) / denom))


def check_gradients(f, tensors, h: float = 1e-5) -> float:
    """Compare backward-pass gradients of scalar ``f()`` against central differences.

    ``f`` must rebuild the graph on every call (it is re-evaluated under
    perturbation). Returns the worst relative error over all ``tensors``.
    """
    for t in tensors:
        t.zero_grad()
    loss = f()
    loss.backward()
    worst = 0.0
    for t in tensors:
        analytic = np.zeros_like(t.data) if t.grad is None else t.grad
        numeric = numerical_grad(f, t, h=h)
        worst = max(worst, max_rel_error(analytic, numeric))
    return worst

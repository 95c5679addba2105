"""Linear ridge baseline: envelope regressed on time-lagged EEG.

For target sample tau inside a window, the features are the EEG window rows
tau + m for m in 0..n_lags-1 (zero-padded past the window end). With the
standard pairing delay already applied by the windowing, lag m corresponds to
an absolute stimulus-to-response latency of 500 ms + m/64 s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dsp import pearson
from ..errors import NumericsError

N_LAGS = 33  # 0..500 ms inclusive at 64 Hz
DEFAULT_LAMBDA_GRID = tuple(float(x) for x in np.logspace(-2, 6, 9))


def lagged_design(eeg_window: np.ndarray, n_lags: int = N_LAGS) -> np.ndarray:
    """[T, C] EEG window -> [T, n_lags * C] design matrix (no bias column)."""
    t, c = eeg_window.shape
    padded = np.vstack([eeg_window, np.zeros((n_lags - 1, c))])
    out = np.empty((t, n_lags, c))
    for m in range(n_lags):
        out[:, m, :] = padded[m:m + t, :]
    return out.reshape(t, n_lags * c)


@dataclass
class MtrfModel:
    weights: np.ndarray  # [n_lags * C + 1], bias last
    n_lags: int
    n_channels: int
    ridge_lambda: float

    def __post_init__(self):
        expected = self.n_lags * self.n_channels + 1
        if self.weights.shape != (expected,):
            raise ValueError(
                f"mtrf weights must have shape ({expected},), got {self.weights.shape}"
            )
        if not np.all(np.isfinite(self.weights)):
            raise NumericsError("mtrf weights are not finite")

    def param_count(self) -> int:
        return self.weights.size

    def predict_window(self, eeg_window: np.ndarray) -> np.ndarray:
        x = lagged_design(eeg_window, self.n_lags)
        return x @ self.weights[:-1] + self.weights[-1]


def _normal_equations(pairs, n_lags: int):
    """Accumulate X^T X and X^T y over windows (bias column appended)."""
    n_feat = n_lags * pairs[0].eeg.shape[1] + 1
    xtx = np.zeros((n_feat, n_feat))
    xty = np.zeros(n_feat)
    chunk, targets = [], []

    def flush():
        nonlocal xtx, xty
        if not chunk:
            return
        x = np.vstack(chunk)
        y = np.concatenate(targets)
        xtx += x.T @ x
        xty += x.T @ y
        chunk.clear()
        targets.clear()

    for p in pairs:
        d = lagged_design(p.eeg, n_lags)
        chunk.append(np.hstack([d, np.ones((d.shape[0], 1))]))
        targets.append(p.target)
        if len(chunk) >= 64:
            flush()
    flush()
    return xtx, xty


def _solve_ridge(xtx, xty, lam: float) -> np.ndarray:
    a = xtx.copy()
    n = a.shape[0]
    if lam > 0:
        a[np.arange(n - 1), np.arange(n - 1)] += lam  # bias stays unregularized
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise NumericsError(
            f"ridge system is singular at lambda={lam:g}; use lambda > 0"
        ) from None
    w = np.linalg.solve(chol.T, np.linalg.solve(chol, xty))
    if not np.all(np.isfinite(w)):
        raise NumericsError(f"ridge solve produced non-finite weights at lambda={lam:g}")
    return w


def mtrf_fit(train_pairs, val_pairs=None, lambdas=DEFAULT_LAMBDA_GRID,
             n_lags: int = N_LAGS):
    """Closed-form ridge per lambda; the grid winner maximizes validation mean
    correlation (train-data correlation when no validation pairs are given).

    Returns (model, {lambda: validation mean rho}).
    """
    if not train_pairs:
        raise ValueError("mtrf_fit: no training windows")
    n_channels = train_pairs[0].eeg.shape[1]
    xtx, xty = _normal_equations(train_pairs, n_lags)
    scoring = val_pairs if val_pairs else train_pairs
    designs = [lagged_design(p.eeg, n_lags) for p in scoring]

    scores = {}
    best = None
    for lam in lambdas:
        w = _solve_ridge(xtx, xty, lam)
        rhos = [pearson(d @ w[:-1] + w[-1], p.target)
                for d, p in zip(designs, scoring)]
        scores[lam] = float(np.mean(rhos))
        if best is None or scores[lam] > scores[best[1]]:
            best = (w, lam)
    model = MtrfModel(weights=best[0], n_lags=n_lags, n_channels=n_channels,
                      ridge_lambda=best[1])
    return model, scores

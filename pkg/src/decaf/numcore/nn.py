"""Neural-network layers on top of the autodiff tensor.

Weight initialization is uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) with zero
biases, drawn from the generator passed to each layer, so a model built twice
from the same seed is bit-identical.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, ShapeError
from .tensor import Tensor, _node, concat, conv1d, dropout, layer_norm, softmax


def uniform_param(rng: np.random.Generator, shape, fan_in: int) -> Tensor:
    bound = 1.0 / np.sqrt(fan_in)
    return Tensor(rng.uniform(-bound, bound, size=shape), requires_grad=True)


def zeros_param(shape) -> Tensor:
    return Tensor(np.zeros(shape), requires_grad=True)


class Module:
    """Minimal parameter container; children discovered from attributes in
    definition order, which fixes the checkpoint serialization order."""

    def named_parameters(self, prefix: str = ""):
        for name, value in vars(self).items():
            full = f"{prefix}{name}"
            if isinstance(value, Tensor) and value.requires_grad:
                yield full, value
            elif isinstance(value, Module):
                yield from value.named_parameters(f"{full}.")
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{full}.{i}.")
                    elif isinstance(item, Tensor) and item.requires_grad:
                        yield f"{full}.{i}", item

    def parameters(self):
        return [p for _, p in self.named_parameters()]

    def param_count(self) -> int:
        return sum(p.size for p in self.parameters())

    def zero_grad(self):
        for p in self.parameters():
            p.zero_grad()


class Linear(Module):
    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator):
        self.weight = uniform_param(rng, (in_features, out_features), fan_in=in_features)
        self.bias = zeros_param(out_features)

    def __call__(self, x: Tensor) -> Tensor:
        return x @ self.weight + self.bias


class Conv1d(Module):
    """Time-preserving 1-D convolution, channels-last ([.., T, Cin] -> [.., T, Cout])."""

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int,
                 rng: np.random.Generator, padding: str = "same"):
        self.padding = padding
        self.weight = uniform_param(
            rng, (out_channels, in_channels, kernel_size), fan_in=in_channels * kernel_size
        )
        self.bias = zeros_param(out_channels)

    def __call__(self, x: Tensor) -> Tensor:
        return conv1d(x, self.weight, self.bias, padding=self.padding)


class LayerNorm(Module):
    def __init__(self, dim: int, eps: float = 1e-5):
        self.eps = eps
        self.gain = Tensor(np.ones(dim), requires_grad=True)
        self.bias = zeros_param(dim)

    def __call__(self, x: Tensor) -> Tensor:
        return layer_norm(x, self.gain, self.bias, eps=self.eps)


def gru_layer(x: Tensor, w_ih: Tensor, w_hh: Tensor, b_ih: Tensor, b_hh: Tensor,
              h0: Tensor) -> Tensor:
    """One GRU layer over [B, T, Din] -> [B, T, H], as a single fused op.

    Cell equations (gates in r, z, n order):

        r_t = sigmoid(W_ir x_t + b_ir + W_hr h_{t-1} + b_hr)
        z_t = sigmoid(W_iz x_t + b_iz + W_hz h_{t-1} + b_hz)
        n_t = tanh(W_in x_t + b_in + r_t * (W_hn h_{t-1} + b_hn))
        h_t = (1 - z_t) * n_t + z_t * h_{t-1}

    The backward rule is hand-written truncated-nowhere BPTT; running it as
    one node keeps the graph small for long sequences.
    """
    b, t, din = x.shape
    h = w_hh.shape[0]
    gx = (x.data.reshape(b * t, din) @ w_ih.data).reshape(b, t, 3 * h) + b_ih.data
    whh, bhh = w_hh.data, b_hh.data
    # per-step activations retained for backward
    rs = np.empty((b, t, h))
    zs = np.empty((b, t, h))
    ns = np.empty((b, t, h))
    ghn = np.empty((b, t, h))  # W_hn h_{t-1} + b_hn, needed for dr
    hs = np.empty((b, t, h))
    hprev = h0.data
    for step in range(t):
        gh = hprev @ whh + bhh
        pre = gx[:, step, :]
        r = _sigmoid(pre[:, :h] + gh[:, :h])
        z = _sigmoid(pre[:, h:2 * h] + gh[:, h:2 * h])
        n = np.tanh(pre[:, 2 * h:] + r * gh[:, 2 * h:])
        hprev = (1.0 - z) * n + z * hprev
        rs[:, step], zs[:, step], ns[:, step] = r, z, n
        ghn[:, step] = gh[:, 2 * h:]
        hs[:, step] = hprev

    def back(g):
        dgx = np.empty((b, t, 3 * h))
        dwhh = np.zeros_like(whh)
        dbhh = np.zeros_like(bhh)
        dh = np.zeros((b, h))
        for step in range(t - 1, -1, -1):
            dh = dh + g[:, step]
            r, z, n = rs[:, step], zs[:, step], ns[:, step]
            h_prev = h0.data if step == 0 else hs[:, step - 1]
            dn = dh * (1.0 - z)
            dz = dh * (h_prev - n)
            dh_prev = dh * z
            da_n = dn * (1.0 - n * n)
            dr = da_n * ghn[:, step]
            da_z = dz * z * (1.0 - z)
            da_r = dr * r * (1.0 - r)
            dgh = np.concatenate([da_r, da_z, da_n * r], axis=1)
            dh_prev += dgh @ whh.T
            dwhh += h_prev.T @ dgh
            dbhh += dgh.sum(axis=0)
            dgx[:, step, :h] = da_r
            dgx[:, step, h:2 * h] = da_z
            dgx[:, step, 2 * h:] = da_n
            dh = dh_prev
        dgx2 = dgx.reshape(b * t, 3 * h)
        dx = np.empty((b, t, din))
        np.matmul(dgx2, w_ih.data.T, out=dx.reshape(b * t, din))
        dwih = x.data.reshape(b * t, din).T @ dgx2
        return dx, dwih, dwhh, dgx2.sum(axis=0), dbhh, dh

    return _node(hs, (x, w_ih, w_hh, b_ih, b_hh, h0), back)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


class GRU(Module):
    """Unidirectional multi-layer GRU, strictly causal in time (see
    :func:`gru_layer` for the cell equations)."""

    def __init__(self, input_size: int, hidden_size: int, num_layers: int,
                 rng: np.random.Generator):
        self.hidden_size = hidden_size
        self.num_layers = num_layers
        self.w_ih, self.w_hh, self.b_ih, self.b_hh = [], [], [], []
        for layer in range(num_layers):
            din = input_size if layer == 0 else hidden_size
            self.w_ih.append(uniform_param(rng, (din, 3 * hidden_size), fan_in=din))
            self.w_hh.append(uniform_param(rng, (hidden_size, 3 * hidden_size),
                                           fan_in=hidden_size))
            self.b_ih.append(zeros_param(3 * hidden_size))
            self.b_hh.append(zeros_param(3 * hidden_size))

    def __call__(self, x: Tensor, initial_state=None):
        """x: [T, Din] or [B, T, Din] -> (outputs [.., T, H], final states per layer)."""
        if not np.all(np.isfinite(x.data)):
            raise ShapeError("gru: non-finite input")
        batched = x.ndim == 3
        if not batched:
            x = x.reshape(1, *x.shape)
        b, t, _ = x.shape
        states = []
        seq = x
        for layer in range(self.num_layers):
            if initial_state is None:
                h0 = Tensor(np.zeros((b, self.hidden_size)))
            else:
                h0 = initial_state[layer]
            seq = gru_layer(seq, self.w_ih[layer], self.w_hh[layer],
                            self.b_ih[layer], self.b_hh[layer], h0)
            states.append(seq[:, t - 1, :])
        if not batched:
            seq = seq.reshape(t, self.hidden_size)
        return seq, states


def attention_core(q: Tensor, k: Tensor, v: Tensor, mask=None) -> Tensor:
    """Fused scaled dot-product attention over [B, h, T, dh] head stacks.

    Computes softmax((q/sqrt(dh)) k^T) v as one graph node; only the
    attention weights are retained for the hand-written backward, which keeps
    two [B, h, T, T] gradient buffers off the tape. ``mask`` is boolean
    [T, T], True at visible positions; masked weights are exactly zero.
    """
    b, h, t, dh = q.shape
    scale = 1.0 / np.sqrt(dh)
    qs = q.data * scale
    weights = qs @ np.swapaxes(k.data, -1, -2)
    if mask is not None:
        weights += np.where(mask, 0.0, -np.inf)
    weights -= weights.max(axis=-1, keepdims=True)
    np.exp(weights, out=weights)
    weights /= weights.sum(axis=-1, keepdims=True)
    out = weights @ v.data

    def back(g):
        dw = g @ np.swapaxes(v.data, -1, -2)
        dv = np.swapaxes(weights, -1, -2) @ g
        dw *= weights
        dw -= weights * dw.sum(axis=-1, keepdims=True)  # softmax jacobian
        dq = dw @ k.data
        dq *= scale
        dk = np.swapaxes(dw, -1, -2) @ qs
        return dq, dk, dv

    # weights come along for inspection; they are not part of the graph
    return _node(out, (q, k, v), back), weights


class MultiheadAttention(Module):
    """Scaled dot-product attention with learned Q/K/V/output projections."""

    def __init__(self, d_model: int, n_heads: int, rng: np.random.Generator):
        if d_model % n_heads != 0:
            raise ConfigError(f"d_model={d_model} not divisible by n_heads={n_heads}")
        self.n_heads = n_heads
        self.d_head = d_model // n_heads
        self.wq = Linear(d_model, d_model, rng)
        self.wk = Linear(d_model, d_model, rng)
        self.wv = Linear(d_model, d_model, rng)
        self.wo = Linear(d_model, d_model, rng)

    def __call__(self, q: Tensor, k: Tensor, v: Tensor, causal: bool = False,
                 return_weights: bool = False):
        batched = q.ndim == 3
        if not batched:
            q, k, v = (t.reshape(1, *t.shape) for t in (q, k, v))
        b, t, d = q.shape
        h, dh = self.n_heads, self.d_head

        def split_heads(x):
            return x.reshape(b, t, h, dh).transpose(0, 2, 1, 3)  # [B, h, T, dh]

        qh = split_heads(self.wq(q))
        kh = split_heads(self.wk(k))
        vh = split_heads(self.wv(v))
        mask = np.tril(np.ones((t, t), dtype=bool)) if causal else None
        ctx, weights = attention_core(qh, kh, vh, mask=mask)  # [B, h, T, dh]
        out = self.wo(ctx.transpose(0, 2, 1, 3).reshape(b, t, d))
        if not batched:
            out = out.reshape(t, d)
        if return_weights:
            return out, Tensor(weights)
        return out


def sinusoidal_positions(t: int, d: int) -> np.ndarray:
    """Classic fixed sin/cos position table, shape [T, D]."""
    pos = np.arange(t)[:, None]
    i = np.arange(d // 2)[None, :]
    angles = pos / np.power(10000.0, 2.0 * i / d)
    table = np.zeros((t, d))
    table[:, 0::2] = np.sin(angles)
    table[:, 1::2] = np.cos(angles[:, : d - d // 2] if d % 2 else angles)
    return table


class FeedForward(Module):
    """Position-wise MLP with ReLU."""

    def __init__(self, d_model: int, hidden: int, rng: np.random.Generator):
        self.lin1 = Linear(d_model, hidden, rng)
        self.lin2 = Linear(hidden, d_model, rng)

    def __call__(self, x: Tensor) -> Tensor:
        return self.lin2(self.lin1(x).relu())


class TransformerBlock(Module):
    """Pre-norm self-attention block: x + Attn(LN(x)), then x + FFN(LN(x))."""

    def __init__(self, d_model: int, n_heads: int, ffn_dim: int,
                 rng: np.random.Generator, dropout_p: float = 0.0):
        self.dropout_p = dropout_p
        self.norm1 = LayerNorm(d_model)
        self.attn = MultiheadAttention(d_model, n_heads, rng)
        self.norm2 = LayerNorm(d_model)
        self.ffn = FeedForward(d_model, ffn_dim, rng)

    def __call__(self, x: Tensor, train: bool = False, rng=None) -> Tensor:
        a = self.norm1(x)
        a = self.attn(a, a, a)
        if train and self.dropout_p > 0.0:
            a = dropout(a, self.dropout_p, rng)
        x = x + a
        f = self.ffn(self.norm2(x))
        if train and self.dropout_p > 0.0:
            f = dropout(f, self.dropout_p, rng)
        return x + f

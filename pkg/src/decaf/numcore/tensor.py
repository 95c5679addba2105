"""Dense float64 tensors with reverse-mode automatic differentiation.

Every operation records a backward rule on the implicit graph (the "tape"):
each output tensor keeps references to its parents and a closure that routes
its upstream gradient to them. ``backward`` on a scalar walks the graph once
in reverse topological order. The graph is single-use: a completed backward
releases every visited node, and running backward through the same nodes
again raises :class:`GraphError`.

All compute is 64-bit; inputs of any dtype are converted on construction.
"""

from __future__ import annotations

import contextlib

import numpy as np

from ..errors import GraphError, ShapeError

_grad_enabled = True


@contextlib.contextmanager
def no_grad():
    """Disable graph recording inside the block (inference / finite differences)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def _check_broadcast(a_shape, b_shape, op):
    """Right-aligned broadcast check; raises ShapeError naming the axis."""
    for i in range(1, min(len(a_shape), len(b_shape)) + 1):
        da, db = a_shape[-i], b_shape[-i]
        if da != db and da != 1 and db != 1:
            raise ShapeError(
                f"{op}: shapes {a_shape} and {b_shape} differ at axis {-i} ({da} vs {db})"
            )


def _unbroadcast(g, shape):
    """Sum gradient ``g`` down to ``shape`` (inverse of numpy broadcasting)."""
    extra = g.ndim - len(shape)
    if extra:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


class Tensor:
    """N-dimensional float64 array with an optional gradient buffer."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "_spent")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = ()
        self._backward = None
        self._spent = False

    # -- bookkeeping ------------------------------------------------------

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def detach(self) -> "Tensor":
        """Copy of the value with no graph attached."""
        return Tensor(self.data.copy())

    def zero_grad(self):
        self.grad = None

    def _accum(self, g, owned: bool = False):
        if self.grad is None:
            # copy unless the caller guarantees g is a freshly-allocated
            # buffer this tensor may take over
            self.grad = g if owned else np.array(g)
        else:
            self.grad += g

    def __repr__(self):
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.data.shape}{flag})"

    # -- backward ---------------------------------------------------------

    def backward(self):
        """Reverse-mode gradient accumulation from this scalar.

        Visits each recorded node exactly once in reverse topological order,
        then releases the graph. Leaves that were never reached keep
        ``grad is None`` (identically zero).
        """
        if self.data.size != 1:
            raise GraphError(f"backward requires a scalar loss, got shape {self.data.shape}")
        if self._spent:
            raise GraphError("backward already ran through this graph; graphs are single-use")

        # Iterative topological sort (graph depth exceeds Python's recursion
        # limit for long recurrences).
        order = []
        visited = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in visited:
                    stack.append((p, False))

        self._accum(np.ones_like(self.data))
        for node in reversed(order):
            if node._backward is not None:
                if node._spent:
                    raise GraphError("graph node already consumed by a previous backward")
                node._backward(node.grad)
                node._spent = True
                node._backward = None
                node._parents = ()
                if node is not self:
                    node.grad = None  # intermediate grads are not retained

    # -- op construction --------------------------------------------------

    @staticmethod
    def _coerce(x) -> "Tensor":
        return x if isinstance(x, Tensor) else Tensor(x)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = Tensor._coerce(other)
        _check_broadcast(self.shape, other.shape, "add")
        return _node(
            self.data + other.data,
            (self, other),
            lambda g: (_unbroadcast(g, self.shape), _unbroadcast(g, other.shape)),
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = Tensor._coerce(other)
        _check_broadcast(self.shape, other.shape, "sub")
        return _node(
            self.data - other.data,
            (self, other),
            lambda g: (_unbroadcast(g, self.shape), _unbroadcast(-g, other.shape)),
        )

    def __rsub__(self, other):
        return Tensor._coerce(other) - self

    def __mul__(self, other):
        other = Tensor._coerce(other)
        _check_broadcast(self.shape, other.shape, "mul")
        a, b = self.data, other.data
        return _node(
            a * b,
            (self, other),
            lambda g: (_unbroadcast(g * b, self.shape), _unbroadcast(g * a, other.shape)),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Tensor._coerce(other)
        _check_broadcast(self.shape, other.shape, "div")
        a, b = self.data, other.data
        out = a / b
        return _node(
            out,
            (self, other),
            lambda g: (
                _unbroadcast(g / b, self.shape),
                _unbroadcast(-g * out / b, other.shape),
            ),
        )

    def __rtruediv__(self, other):
        return Tensor._coerce(other) / self

    def __neg__(self):
        return _node(-self.data, (self,), lambda g: (-g,))

    def __matmul__(self, other):
        other = Tensor._coerce(other)
        a, b = self.data, other.data
        if a.ndim < 2 or b.ndim < 2:
            raise ShapeError("matmul requires >= 2-d operands")
        if a.shape[-1] != b.shape[-2]:
            raise ShapeError(
                f"matmul: inner axes disagree, {a.shape} @ {b.shape} "
                f"({a.shape[-1]} vs {b.shape[-2]})"
            )

        if a.ndim > 2 and b.ndim == 2:
            # stacked-left case (linear layers): one flat GEMM beats numpy's
            # batched loop, in forward and backward alike
            k, n = b.shape
            a2 = a.reshape(-1, k)
            out = (a2 @ b).reshape(*a.shape[:-1], n)

            def back(g):
                g2 = np.ascontiguousarray(g.reshape(-1, n))
                ga = np.empty(a.shape)
                np.matmul(g2, b.T, out=ga.reshape(-1, k))
                return ga, a2.T @ g2

            return _node(out, (self, other), back)

        def back(g):
            ga = _unbroadcast(g @ np.swapaxes(b, -1, -2), self.shape)
            gb = _unbroadcast(np.swapaxes(a, -1, -2) @ g, other.shape)
            return ga, gb

        return _node(a @ b, (self, other), back)

    # -- pointwise nonlinearities -------------------------------------------

    def relu(self):
        mask = self.data > 0
        return _node(np.where(mask, self.data, 0.0), (self,), lambda g: (g * mask,))

    def sigmoid(self):
        # Stable two-sided evaluation. Saturated tails are clamped to the
        # nearest representable interior values so the output is strictly
        # inside (0, 1) even where exp underflows.
        x = self.data
        e = np.exp(-np.abs(x))
        out = np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
        out = np.clip(out, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))
        return _node(out, (self,), lambda g: (g * out * (1.0 - out),))

    def tanh(self):
        out = np.tanh(self.data)
        return _node(out, (self,), lambda g: (g * (1.0 - out * out),))

    def exp(self):
        out = np.exp(self.data)
        return _node(out, (self,), lambda g: (g * out,))

    def log(self):
        return _node(np.log(self.data), (self,), lambda g: (g / self.data,))

    def sqrt(self):
        out = np.sqrt(self.data)
        return _node(out, (self,), lambda g: (g * 0.5 / out,))

    def abs(self):
        sign = np.sign(self.data)
        return _node(np.abs(self.data), (self,), lambda g: (g * sign,))

    # -- reductions -----------------------------------------------------------

    def sum(self, axis=None, keepdims: bool = False):
        out = self.data.sum(axis=axis, keepdims=keepdims)

        def back(g):
            g = np.asarray(g)
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            return (np.broadcast_to(g, self.shape).copy(),)

        return _node(out, (self,), back)

    def mean(self, axis=None, keepdims: bool = False):
        n = self.data.size if axis is None else np.prod(
            [self.shape[a] for a in np.atleast_1d(axis)]
        )
        return self.sum(axis=axis, keepdims=keepdims) / float(n)

    # -- shape manipulation -----------------------------------------------------

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        old = self.shape
        return _node(self.data.reshape(shape), (self,), lambda g: (g.reshape(old),))

    def transpose(self, *axes):
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        inv = tuple(np.argsort(axes))
        return _node(self.data.transpose(axes), (self,), lambda g: (g.transpose(inv),))

    def swapaxes(self, a, b):
        return _node(
            np.swapaxes(self.data, a, b), (self,), lambda g: (np.swapaxes(g, a, b),)
        )

    def __getitem__(self, idx):
        # Basic (slice/int) indexing only. Backward scatters straight into the
        # parent's grad buffer so per-step slicing of long sequences does not
        # materialize a full-size zeros array per slice.
        out = Tensor(self.data[idx].copy())
        if _grad_enabled and self.requires_grad:
            out.requires_grad = True
            out._parents = (self,)

            def run(g):
                if self.grad is None:
                    self.grad = np.zeros_like(self.data)
                self.grad[idx] += g

            out._backward = run
        return out


def _node(data, parents, backward_fn):
    """Build an op output; records the backward rule only while grad is enabled."""
    out = Tensor(data)
    if _grad_enabled and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)

        def run(g):
            grads = backward_fn(g)
            # A backward rule may hand the same buffer to several parents
            # (pass-through ops) or hand back g itself; those must be copied.
            # A buffer seen only once can be adopted as the parent's grad.
            seen = {id(g)}
            for p, pg in zip(parents, grads):
                if p.requires_grad and pg is not None:
                    owned = id(pg) not in seen and pg.base is None
                    seen.add(id(pg))
                    p._accum(pg, owned=owned)

        out._backward = run
    return out


# -- free functions ------------------------------------------------------------


def concat(tensors, axis: int = -1) -> Tensor:
    """Concatenate along ``axis``; gradient splits back to the inputs."""
    tensors = [Tensor._coerce(t) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def back(g):
        return tuple(np.ascontiguousarray(p) for p in np.split(g, splits, axis=axis))

    return _node(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), back)


def softmax(x: Tensor, axis: int = -1, mask=None) -> Tensor:
    """Softmax along ``axis``; rows sum to 1.

    ``mask`` is an optional boolean array broadcastable to ``x`` with True at
    visible positions. Masked logits are treated as -inf, so masked positions
    get exactly zero weight and receive exactly zero gradient.
    """
    x = Tensor._coerce(x)
    if mask is not None:
        # additive -inf mask: one fused pass instead of a np.where copy
        out = x.data + np.where(mask, 0.0, -np.inf)
    else:
        out = x.data.copy()
    out -= out.max(axis=axis, keepdims=True)
    np.exp(out, out=out)
    out /= out.sum(axis=axis, keepdims=True)

    def back(g):
        dot = (g * out).sum(axis=axis, keepdims=True)
        return (out * (g - dot),)

    return _node(out, (x,), back)


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize the last axis to zero mean / unit variance, then scale and shift."""
    x, gain, bias = Tensor._coerce(x), Tensor._coerce(gain), Tensor._coerce(bias)
    d = x.shape[-1]
    if gain.shape != (d,) or bias.shape != (d,):
        raise ShapeError(
            f"layer_norm: gain/bias must have shape ({d},), got {gain.shape} and {bias.shape}"
        )
    mu = x.data.mean(axis=-1, keepdims=True)
    var = x.data.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mu) * inv

    def back(g):
        batch_axes = tuple(range(g.ndim - 1))
        dgain = (g * xhat).sum(axis=batch_axes)
        dbias = g.sum(axis=batch_axes)
        dk = g * gain.data
        dx = inv * (dk - dk.mean(axis=-1, keepdims=True)
                    - xhat * (dk * xhat).mean(axis=-1, keepdims=True))
        return dx, dgain, dbias

    return _node(xhat * gain.data + bias.data, (x, gain, bias), back)


def dropout(x: Tensor, p: float, rng: np.random.Generator) -> Tensor:
    """Inverted dropout: keep with probability 1-p, rescale by 1/(1-p)."""
    if p <= 0.0:
        return x
    x = Tensor._coerce(x)
    keep = (rng.random(x.shape) >= p) / (1.0 - p)
    return _node(x.data * keep, (x,), lambda g: (g * keep,))


def conv1d(x: Tensor, weight: Tensor, bias=None, padding: str = "same") -> Tensor:
    """Length-preserving 1-D convolution over the time axis.

    ``x`` is [T, Cin] or [B, T, Cin]; ``weight`` is [Cout, Cin, K]; optional
    ``bias`` is [Cout]. ``padding="same"`` zero-pads floor(K/2) on both sides
    (K must be odd); ``padding="causal"`` zero-pads K-1 on the left so output
    t depends only on inputs <= t.
    """
    x, weight = Tensor._coerce(x), Tensor._coerce(weight)
    if weight.ndim != 3:
        raise ShapeError(f"conv1d: weight must be [Cout, Cin, K], got {weight.shape}")
    cout, cin, k = weight.shape
    batched = x.ndim == 3
    if x.ndim not in (2, 3):
        raise ShapeError(f"conv1d: input must be [T, Cin] or [B, T, Cin], got {x.shape}")
    if x.shape[-1] != cin:
        raise ShapeError(
            f"conv1d: channel axis -1 mismatch, input has {x.shape[-1]} channels, "
            f"weight expects {cin}"
        )
    if padding == "same":
        if k % 2 == 0:
            raise ShapeError(f"conv1d: same padding requires odd kernel, got K={k}")
        left = right = k // 2
    elif padding == "causal":
        left, right = k - 1, 0
    else:
        raise ShapeError(f"conv1d: unknown padding mode {padding!r}")

    xd = x.data if batched else x.data[None]
    b_, t, _ = xd.shape
    xp = np.pad(xd, ((0, 0), (left, right), (0, 0)))
    # windows[b, t, k, c] = xp[b, t + k, c]; strided view, no copy
    s0, s1, s2 = xp.strides
    win = np.lib.stride_tricks.as_strided(
        xp, shape=(b_, t, k, cin), strides=(s0, s1, s1, s2), writeable=False
    )
    wmat = weight.data.transpose(2, 1, 0).reshape(k * cin, cout)
    out = win.reshape(b_ * t, k * cin) @ wmat
    out = out.reshape(b_, t, cout)
    if bias is not None:
        bias = Tensor._coerce(bias)
        if bias.shape != (cout,):
            raise ShapeError(f"conv1d: bias must have shape ({cout},), got {bias.shape}")
        out = out + bias.data

    parents = (x, weight) if bias is None else (x, weight, bias)

    def back(g):
        gf = g if batched else g[None]
        gflat = gf.reshape(b_ * t, cout)
        gw = (win.reshape(b_ * t, k * cin).T @ gflat)  # [K*Cin, Cout]
        gw = gw.reshape(k, cin, cout).transpose(2, 1, 0)
        gwin = (gflat @ wmat.T).reshape(b_, t, k, cin)
        gxp = np.zeros_like(xp)
        for j in range(k):
            gxp[:, j:j + t, :] += gwin[:, :, j, :]
        gx = gxp[:, left:left + t, :]
        if not batched:
            gx = gx[0]
        if bias is None:
            return gx, gw
        return gx, gw, gf.sum(axis=(0, 1))

    return _node(out if batched else out[0], parents, back)

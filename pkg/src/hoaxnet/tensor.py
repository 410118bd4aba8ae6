"""Dense tensors with reverse-mode automatic differentiation.

A `Tensor` wraps a numpy array plus an optional gradient. Operations record
backward closures on the result node; `backward()` on a scalar loss replays
them in reverse topological order. float32 is the training dtype, float64 is
used by the finite-difference oracles in the test suite.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import expit


class ShapeError(ValueError):
    """Raised when operand shapes violate an operation's contract."""


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        arr = np.asarray(data, dtype=dtype)
        if arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(np.float32)
        self.data = arr
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[np.ndarray], None] | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    def item(self) -> float:
        return float(self.data)

    def accumulate_grad(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        """Populate `.grad` of every reachable requires_grad tensor.

        Only defined for scalar results, matching the loss contract.
        """
        if self.data.size != 1:
            raise ValueError(
                f"backward() requires a scalar, got shape {self.shape}"
            )
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen:
                    stack.append((p, False))
        self.accumulate_grad(np.ones_like(self.data))
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # Arithmetic sugar; the named functions below do the work.
    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)


def backward(loss: Tensor) -> None:
    loss.backward()


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _result(data: np.ndarray, parents: Sequence[Tensor],
            backward_fn: Callable[[np.ndarray], None] | None) -> Tensor:
    out = Tensor.__new__(Tensor)
    out.data = data
    out.grad = None
    out.requires_grad = any(p.requires_grad for p in parents)
    if out.requires_grad:
        out._parents = tuple(parents)
        out._backward = backward_fn
    else:
        out._parents = ()
        out._backward = None
    return out


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcasted gradient back down to `shape`."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out_data = a.data + b.data

    def back(grad):
        if a.requires_grad:
            a.accumulate_grad(_unbroadcast(grad, a.shape))
        if b.requires_grad:
            b.accumulate_grad(_unbroadcast(grad, b.shape))

    return _result(out_data, (a, b), back)


def sub(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out_data = a.data - b.data

    def back(grad):
        if a.requires_grad:
            a.accumulate_grad(_unbroadcast(grad, a.shape))
        if b.requires_grad:
            b.accumulate_grad(_unbroadcast(-grad, b.shape))

    return _result(out_data, (a, b), back)


def mul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out_data = a.data * b.data

    def back(grad):
        if a.requires_grad:
            a.accumulate_grad(_unbroadcast(grad * b.data, a.shape))
        if b.requires_grad:
            b.accumulate_grad(_unbroadcast(grad * a.data, b.shape))

    return _result(out_data, (a, b), back)


def neg(a) -> Tensor:
    a = _as_tensor(a)

    def back(grad):
        if a.requires_grad:
            a.accumulate_grad(-grad)

    return _result(-a.data, (a,), back)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product. Operands are 2-D, or stacks of matrices where one
    side may be a plain 2-D matrix broadcast across the stack."""
    a, b = _as_tensor(a), _as_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise ShapeError(
            f"matmul needs matrices, got shapes {a.shape} and {b.shape}"
        )
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError(
            f"matmul inner extents disagree: {a.shape} x {b.shape}"
        )
    out_data = np.matmul(a.data, b.data)

    def back(grad):
        if a.requires_grad:
            ga = np.matmul(grad, np.swapaxes(b.data, -1, -2))
            a.accumulate_grad(_unbroadcast(ga, a.shape))
        if b.requires_grad:
            gb = np.matmul(np.swapaxes(a.data, -1, -2), grad)
            b.accumulate_grad(_unbroadcast(gb, b.shape))

    return _result(out_data, (a, b), back)


def transpose_last(a: Tensor) -> Tensor:
    """Swap the last two axes."""
    a = _as_tensor(a)

    def back(grad):
        if a.requires_grad:
            a.accumulate_grad(np.swapaxes(grad, -1, -2))

    return _result(np.swapaxes(a.data, -1, -2), (a,), back)


def reshape(a: Tensor, shape: tuple[int, ...]) -> Tensor:
    a = _as_tensor(a)
    orig = a.shape

    def back(grad):
        if a.requires_grad:
            a.accumulate_grad(grad.reshape(orig))

    return _result(a.data.reshape(shape), (a,), back)


def sigmoid(x: Tensor) -> Tensor:
    x = _as_tensor(x)
    y = expit(x.data)

    def back(grad):
        if x.requires_grad:
            x.accumulate_grad(grad * y * (1.0 - y))

    return _result(y, (x,), back)


def tanh(x: Tensor) -> Tensor:
    x = _as_tensor(x)
    y = np.tanh(x.data)

    def back(grad):
        if x.requires_grad:
            x.accumulate_grad(grad * (1.0 - y * y))

    return _result(y, (x,), back)


def relu(x: Tensor) -> Tensor:
    x = _as_tensor(x)
    mask = x.data > 0

    def back(grad):
        if x.requires_grad:
            x.accumulate_grad(grad * mask)

    return _result(np.maximum(x.data, 0), (x,), back)


_ELEMENTWISE = {"sigmoid": sigmoid, "tanh": tanh, "relu": relu}


def elementwise(x: Tensor, fn: str) -> Tensor:
    """Apply one of {sigmoid, tanh, relu} per element."""
    try:
        op = _ELEMENTWISE[fn]
    except KeyError:
        raise ValueError(f"unknown elementwise function {fn!r}") from None
    return op(x)


def log(x: Tensor) -> Tensor:
    x = _as_tensor(x)

    def back(grad):
        if x.requires_grad:
            x.accumulate_grad(grad / x.data)

    return _result(np.log(x.data), (x,), back)


def clip(x: Tensor, lo: float, hi: float) -> Tensor:
    """Clamp values; gradient passes through unclipped positions only."""
    x = _as_tensor(x)
    inside = (x.data >= lo) & (x.data <= hi)

    def back(grad):
        if x.requires_grad:
            x.accumulate_grad(grad * inside)

    return _result(np.clip(x.data, lo, hi), (x,), back)


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    """Stable softmax along `axis`; each slice sums to 1."""
    x = _as_tensor(x)
    if not np.isfinite(x.data).all():
        raise ValueError("softmax input must be finite")
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=axis, keepdims=True)

    def back(grad):
        if x.requires_grad:
            inner = (grad * y).sum(axis=axis, keepdims=True)
            x.accumulate_grad((grad - inner) * y)

    return _result(y, (x,), back)


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor,
               eps: float = 1e-5) -> Tensor:
    """Normalize each row (last axis) to zero mean / unit variance, then
    scale by gamma and shift by beta."""
    x, gamma, beta = _as_tensor(x), _as_tensor(gamma), _as_tensor(beta)
    d = x.shape[-1]
    mu = x.data.mean(axis=-1, keepdims=True)
    centered = x.data - mu
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = centered * inv_std
    y = gamma.data * xhat + beta.data

    def back(grad):
        if gamma.requires_grad:
            gamma.accumulate_grad(
                _unbroadcast(grad * xhat, gamma.shape))
        if beta.requires_grad:
            beta.accumulate_grad(_unbroadcast(grad, beta.shape))
        if x.requires_grad:
            dxhat = grad * gamma.data
            # standard layer-norm backward over the last axis
            sum_dxhat = dxhat.sum(axis=-1, keepdims=True)
            sum_dxhat_xhat = (dxhat * xhat).sum(axis=-1, keepdims=True)
            dx = (inv_std / d) * (d * dxhat - sum_dxhat - xhat * sum_dxhat_xhat)
            x.accumulate_grad(dx)

    return _result(y, (x, gamma, beta), back)


def tensor_sum(x: Tensor) -> Tensor:
    x = _as_tensor(x)

    def back(grad):
        if x.requires_grad:
            x.accumulate_grad(np.full_like(x.data, grad))

    return _result(np.asarray(x.data.sum(), dtype=x.dtype), (x,), back)


def tensor_mean(x: Tensor) -> Tensor:
    x = _as_tensor(x)
    n = x.data.size

    def back(grad):
        if x.requires_grad:
            x.accumulate_grad(np.full_like(x.data, grad / n))

    return _result(np.asarray(x.data.mean(), dtype=x.dtype), (x,), back)


def concat(parts: Iterable[Tensor], axis: int = -1) -> Tensor:
    parts = [_as_tensor(p) for p in parts]
    out_data = np.concatenate([p.data for p in parts], axis=axis)
    extents = [p.shape[axis] for p in parts]

    def back(grad):
        offset = 0
        for p, extent in zip(parts, extents):
            if p.requires_grad:
                idx = [slice(None)] * grad.ndim
                idx[axis if axis >= 0 else grad.ndim + axis] = slice(
                    offset, offset + extent)
                p.accumulate_grad(grad[tuple(idx)])
            offset += extent

    return _result(out_data, parts, back)


def narrow(x: Tensor, axis: int, start: int, length: int) -> Tensor:
    """Contiguous slice [start, start+length) along `axis`."""
    x = _as_tensor(x)
    ax = axis if axis >= 0 else x.ndim + axis
    idx = [slice(None)] * x.ndim
    idx[ax] = slice(start, start + length)
    idx = tuple(idx)

    def back(grad):
        if x.requires_grad:
            full = np.zeros_like(x.data)
            full[idx] = grad
            x.accumulate_grad(full)

    return _result(x.data[idx].copy(), (x,), back)


def embedding_lookup(table: Tensor, ids: np.ndarray) -> Tensor:
    """Gather rows of a trainable table; gradient scatter-adds per id."""
    table = _as_tensor(table)
    ids = np.asarray(ids)
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise ValueError(
            f"token id out of range [0, {table.shape[0]}): "
            f"min={ids.min()}, max={ids.max()}"
        )
    out_data = table.data[ids]

    def back(grad):
        if table.requires_grad:
            g = np.zeros_like(table.data)
            np.add.at(g, ids.reshape(-1), grad.reshape(-1, table.shape[1]))
            table.accumulate_grad(g)

    return _result(out_data, (table,), back)

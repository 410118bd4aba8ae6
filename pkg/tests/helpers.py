"""Shared oracles for the test suite.

Everything here is deliberately independent of the implementation paths it
checks: finite differences for gradients, naive loops for matmul/conv,
explicit weight matrices for attention.
"""

import numpy as np

from hoaxnet.tensor import Tensor


def finite_difference_grads(loss_fn, tensors, h=1e-5):
    """Central finite differences of `loss_fn()` w.r.t. each tensor.

    `loss_fn` must recompute the scalar loss from the tensors' current
    `.data` each call. Tensors should be float64 for the 1e-4 tolerance.
    """
    grads = []
    for t in tensors:
        g = np.zeros_like(t.data)
        flat = t.data.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = loss_fn()
            flat[i] = orig - h
            down = loss_fn()
            flat[i] = orig
            gflat[i] = (up - down) / (2 * h)
        grads.append(g)
    return grads


def assert_grads_close(loss_builder, tensors, h=1e-5, rtol=1e-4):
    """Check reverse-mode grads of `loss_builder` against finite differences.

    `loss_builder()` composes a fresh scalar-loss Tensor from `tensors`.
    Relative error is measured against the largest finite-difference entry.
    """
    for t in tensors:
        t.zero_grad()
    loss = loss_builder()
    loss.backward()
    fd = finite_difference_grads(lambda: float(loss_builder().data), tensors, h=h)
    for t, g_fd in zip(tensors, fd):
        assert t.grad is not None, "no gradient reached a requires_grad tensor"
        scale = max(np.abs(g_fd).max(), 1e-8)
        err = np.abs(t.grad - g_fd).max() / scale
        assert err < rtol, f"gradient mismatch: rel err {err:.3e} (scale {scale:.3e})"


def rand_tensor(rng, shape, requires_grad=True, lo=-1.0, hi=1.0):
    """float64 tensor with entries uniform in [lo, hi]."""
    return Tensor(rng.uniform(lo, hi, size=shape), requires_grad=requires_grad,
                  dtype=np.float64)


def matmul_triple_loop(a, b):
    m, k = a.shape
    k2, n = b.shape
    assert k == k2
    out = np.zeros((m, n), dtype=a.dtype)
    for i in range(m):
        for j in range(n):
            s = 0.0
            for t in range(k):
                s += a[i, t] * b[t, j]
            out[i, j] = s
    return out


def attention_reference(q, k, v):
    """Explicit weight-matrix attention: softmax(q k^T / sqrt(d_k)) v."""
    d_k = q.shape[-1]
    logits = (q @ k.T) / np.sqrt(d_k)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    w = np.exp(shifted)
    w /= w.sum(axis=-1, keepdims=True)
    return w @ v, w

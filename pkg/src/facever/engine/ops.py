"""Layer kernels, forward and backward.

Image tensors are laid out [batch, height, width, channels]; convolution
weights are [out_channels, kh, kw, in_channels].  The convolutions run as a
patch-matrix (im2col) reshape followed by one GEMM, which is where nearly
all training time goes; `facever.engine.reference` keeps the plain-loop
versions these are checked against.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import as_strided

from ..errors import ConfigurationError, DimensionError, LabelError


def conv_output_extent(extent: int, kernel: int, stride: int, pad: int) -> int:
    """Output size along one spatial axis; windows must fit entirely."""
    return (extent + 2 * pad - kernel) // stride + 1


def _check_conv_args(x, weights, biases, stride, pad):
    if x.ndim != 4:
        raise DimensionError(f"conv input must be 4-d [N,H,W,C], got shape {x.shape}")
    if weights.ndim != 4:
        raise DimensionError(f"conv weights must be 4-d [Cout,kh,kw,Cin], got {weights.shape}")
    if stride < 1:
        raise ConfigurationError(f"conv stride must be >= 1, got {stride}")
    if pad < 0:
        raise ConfigurationError(f"conv pad must be >= 0, got {pad}")
    n, h, w, cin = x.shape
    cout, kh, kw, wcin = weights.shape
    if wcin != cin:
        raise DimensionError(f"conv weights expect {wcin} input channels, input has {cin}")
    if biases.shape != (cout,):
        raise DimensionError(f"conv biases must have shape ({cout},), got {biases.shape}")
    if h + 2 * pad < kh or w + 2 * pad < kw:
        raise DimensionError(
            f"kernel {kh}x{kw} does not fit input {h}x{w} with pad {pad}"
        )


def _pad_spatial(x, pad):
    if pad == 0:
        return x
    return np.pad(x, ((0, 0), (pad, pad), (pad, pad), (0, 0)))


def _im2col(xp, kh, kw, stride):
    """View of all kh*kw windows: (N, oh, ow, kh, kw, C), then materialized."""
    n, hp, wp, c = xp.shape
    oh = (hp - kh) // stride + 1
    ow = (wp - kw) // stride + 1
    sn, sh, sw, sc = xp.strides
    view = as_strided(
        xp,
        shape=(n, oh, ow, kh, kw, c),
        strides=(sn, sh * stride, sw * stride, sh, sw, sc),
        writeable=False,
    )
    return np.ascontiguousarray(view), oh, ow


def conv2d_forward(x, weights, biases, stride: int = 1, pad: int = 0):
    """Cross-correlation plus bias.  Returns (y, cache) with y [N,oh,ow,Cout]."""
    _check_conv_args(x, weights, biases, stride, pad)
    cout, kh, kw, cin = weights.shape
    xp = _pad_spatial(x, pad)
    cols, oh, ow = _im2col(xp, kh, kw, stride)
    n = x.shape[0]
    cols_mat = cols.reshape(n * oh * ow, kh * kw * cin)
    w_mat = weights.reshape(cout, kh * kw * cin).T
    y = cols_mat @ w_mat + biases
    y = y.reshape(n, oh, ow, cout)
    cache = (cols_mat, x.shape, (stride, pad))
    return y, cache


def conv2d_backward(grad_out, weights, cache):
    """Gradients of the conv forward map.

    Returns (grad_x, grad_w, grad_b).  grad_x comes from scattering the
    column gradients back; per kernel offset the strided windows are
    disjoint, so each offset is one vectorized add.
    """
    cols_mat, x_shape, (stride, pad) = cache
    n, h, w, cin = x_shape
    cout, kh, kw, _ = weights.shape
    oh, ow = grad_out.shape[1], grad_out.shape[2]

    gout_mat = grad_out.reshape(n * oh * ow, cout)
    grad_b = gout_mat.sum(axis=0)
    grad_w = (gout_mat.T @ cols_mat).reshape(cout, kh, kw, cin)

    w_mat = weights.reshape(cout, kh * kw * cin)
    grad_cols = (gout_mat @ w_mat).reshape(n, oh, ow, kh, kw, cin)

    gx = np.zeros((n, h + 2 * pad, w + 2 * pad, cin), dtype=grad_out.dtype)
    for i in range(kh):
        for j in range(kw):
            gx[:, i : i + oh * stride : stride, j : j + ow * stride : stride, :] += (
                grad_cols[:, :, :, i, j, :]
            )
    if pad:
        gx = gx[:, pad : pad + h, pad : pad + w, :]
    return gx, grad_w, grad_b


def maxpool2d_forward(x, window: int, stride: int | None = None):
    """Max over fully-contained windows.  Returns (y, cache with argmaxes)."""
    if x.ndim != 4:
        raise DimensionError(f"pool input must be 4-d [N,H,W,C], got shape {x.shape}")
    if window < 1:
        raise ConfigurationError(f"pool window must be >= 1, got {window}")
    if stride is None:
        stride = window
    if stride < 1:
        raise ConfigurationError(f"pool stride must be >= 1, got {stride}")
    n, h, w, c = x.shape
    if window > h or window > w:
        raise DimensionError(f"pool window {window} exceeds input extent {h}x{w}")
    oh = (h - window) // stride + 1
    ow = (w - window) // stride + 1
    sn, sh, sw, sc = x.strides
    view = as_strided(
        x,
        shape=(n, oh, ow, window, window, c),
        strides=(sn, sh * stride, sw * stride, sh, sw, sc),
        writeable=False,
    )
    flat = view.reshape(n, oh, ow, window * window, c)
    argmax = flat.argmax(axis=3)
    y = np.take_along_axis(flat, argmax[:, :, :, None, :], axis=3)[:, :, :, 0, :]
    cache = (argmax, x.shape, window, stride)
    return y, cache


def maxpool2d_backward(grad_out, cache):
    """Route each upstream gradient to the cell that won its window."""
    argmax, x_shape, window, stride = cache
    n, h, w, c = x_shape
    _, oh, ow, _ = grad_out.shape
    gx = np.zeros(x_shape, dtype=grad_out.dtype)
    di = argmax // window
    dj = argmax % window
    rows = np.arange(oh)[None, :, None, None] * stride + di
    cols = np.arange(ow)[None, None, :, None] * stride + dj
    batch = np.arange(n)[:, None, None, None]
    chan = np.arange(c)[None, None, None, :]
    # overlapping windows (stride < window) can pick the same cell twice
    np.add.at(gx, (batch, rows, cols, chan), grad_out)
    return gx


def relu_forward(x):
    return np.maximum(x, 0)


def relu_backward(x, grad_out):
    """Subgradient 0 at x == 0 (fixed for determinism)."""
    return grad_out * (x > 0)


def fc_forward(x, weights, biases):
    """y = x @ W.T + b with x [N,Din], W [Dout,Din]."""
    if x.ndim != 2:
        raise DimensionError(f"fc input must be 2-d [N,Din], got shape {x.shape}")
    if x.shape[1] != weights.shape[1]:
        raise DimensionError(
            f"fc expects {weights.shape[1]} input features, got {x.shape[1]}"
        )
    return x @ weights.T + biases


def fc_backward(grad_out, x, weights):
    grad_w = grad_out.T @ x
    grad_b = grad_out.sum(axis=0)
    grad_x = grad_out @ weights
    return grad_x, grad_w, grad_b


def softmax(logits):
    """Row softmax with max subtraction for stability."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def softmax_xent(logits, labels):
    """Mean cross-entropy loss and its gradient (softmax - onehot) / N."""
    if logits.ndim != 2:
        raise DimensionError(f"logits must be 2-d [N,K], got shape {logits.shape}")
    labels = np.asarray(labels)
    n, k = logits.shape
    if labels.shape != (n,):
        raise DimensionError(f"labels must have shape ({n},), got {labels.shape}")
    if labels.min(initial=0) < 0 or labels.max(initial=0) >= k:
        raise LabelError(f"labels must lie in [0, {k})")
    probs = softmax(logits)
    picked = probs[np.arange(n), labels]
    loss = float(-np.log(picked).mean())
    grad = probs
    grad[np.arange(n), labels] -= 1.0
    grad /= n
    return loss, grad

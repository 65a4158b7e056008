"""Plain-loop reference kernels.

Deliberately naive: the nested loops follow the textbook definitions one
element at a time.  They exist to cross-check the optimized kernels and are
far too slow for training.
"""

from __future__ import annotations

import numpy as np

from .ops import conv_output_extent


def conv2d_naive(x, weights, biases, stride: int = 1, pad: int = 0):
    n, h, w, cin = x.shape
    cout, kh, kw, _ = weights.shape
    oh = conv_output_extent(h, kh, stride, pad)
    ow = conv_output_extent(w, kw, stride, pad)
    xp = np.pad(x, ((0, 0), (pad, pad), (pad, pad), (0, 0))) if pad else x
    y = np.zeros((n, oh, ow, cout), dtype=np.result_type(x, weights))
    for b in range(n):
        for i in range(oh):
            for j in range(ow):
                for f in range(cout):
                    acc = biases[f]
                    for u in range(kh):
                        for v in range(kw):
                            for c in range(cin):
                                acc += (
                                    xp[b, i * stride + u, j * stride + v, c]
                                    * weights[f, u, v, c]
                                )
                    y[b, i, j, f] = acc
    return y


def maxpool2d_naive(x, window: int, stride: int | None = None):
    if stride is None:
        stride = window
    n, h, w, c = x.shape
    oh = (h - window) // stride + 1
    ow = (w - window) // stride + 1
    y = np.empty((n, oh, ow, c), dtype=x.dtype)
    for b in range(n):
        for i in range(oh):
            for j in range(ow):
                for ch in range(c):
                    patch = x[
                        b,
                        i * stride : i * stride + window,
                        j * stride : j * stride + window,
                        ch,
                    ]
                    y[b, i, j, ch] = patch.max()
    return y

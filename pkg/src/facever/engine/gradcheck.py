"""Finite-difference gradient checking (verification mode, 64-bit)."""

from __future__ import annotations

import numpy as np


def numeric_gradient(f, x, eps: float = 1e-5):
    """Central-difference gradient of scalar f with respect to array x.

    Mutates entries of x in place one at a time and restores them, so f must
    read x fresh on every call.
    """
    x = np.asarray(x)
    grad = np.zeros(x.shape, dtype=np.float64)
    flat_x = x.reshape(-1)
    flat_g = grad.reshape(-1)
    for i in range(flat_x.size):
        orig = flat_x[i]
        flat_x[i] = orig + eps
        f_plus = f()
        flat_x[i] = orig - eps
        f_minus = f()
        flat_x[i] = orig
        flat_g[i] = (f_plus - f_minus) / (2.0 * eps)
    return grad


def relative_grad_error(analytic, numeric) -> float:
    """Max elementwise |a - n| / max(|a| + |n|, 1e-6)."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    num = np.abs(analytic - numeric)
    den = np.maximum(np.abs(analytic) + np.abs(numeric), 1e-6)
    return float((num / den).max()) if num.size else 0.0

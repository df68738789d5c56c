"""Base-2 log-domain arithmetic.

Probabilities and densities are carried as ``log2`` values; ``LOG_ZERO``
(``-inf``) is the bottom element representing zero.
"""
import math

import numpy as np

LOG_ZERO = -math.inf


def to_log2(p):
    if p < 0:
        raise ValueError(f"negative quantity {p!r} has no logarithm")
    return math.log2(p) if p > 0 else LOG_ZERO


def from_log2(lv):
    return 2.0 ** lv


def log2_mul(*values):
    """Product of log values (sum of logs); any zero factor gives zero."""
    if any(v == LOG_ZERO for v in values):
        return LOG_ZERO
    return math.fsum(values)


def log2_add(x, y):
    """log2(2**x + 2**y) by max-shifted summation."""
    if x == LOG_ZERO:
        return y
    if y == LOG_ZERO:
        return x
    if x < y:
        x, y = y, x
    return x + math.log2(1.0 + 2.0 ** (y - x))


def log2_sum(values, axis=None):
    """log2 of a sum of quantities given by their log2 values."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return LOG_ZERO
    if axis is None:
        arr = arr.ravel()
        axis = 0
    top = np.max(arr, axis=axis, keepdims=True)
    safe = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log2(np.sum(np.exp2(arr - safe), axis=axis, keepdims=True)) + safe
    out = np.squeeze(out, axis=axis)
    return float(out) if out.ndim == 0 else out

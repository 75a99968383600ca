"""Signal-to-distortion ratio in dB."""

import math

import numpy as np


def sdr(u, v):
    """``10*log10(||u||^2 / ||u - v||^2)``; ``inf`` when ``u == v``."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch {u.shape} vs {v.shape}")
    num = float(np.dot(u.ravel(), u.ravel()))
    if num == 0.0:
        raise ValueError("SDR undefined for a zero reference signal")
    e = (u - v).ravel()
    den = float(np.dot(e, e))
    if den == 0.0:
        return math.inf
    return 10.0 * math.log10(num / den)


def delta_sdr(x, y, x_hat):
    """SDR improvement of ``x_hat`` over the clipped ``y`` w.r.t. the original ``x``.

    Returns 0 when nothing was clipped and nothing changed (``x == y == x_hat``).
    """
    a = sdr(x, x_hat)
    b = sdr(x, y)
    if math.isinf(a) and math.isinf(b):
        return 0.0
    return a - b


def delta_sdr_clipped(x, y, x_hat, clipped):
    """:func:`delta_sdr` restricted to the samples flagged in ``clipped``."""
    clipped = np.asarray(clipped, dtype=bool)
    return delta_sdr(np.asarray(x)[clipped], np.asarray(y)[clipped], np.asarray(x_hat)[clipped])

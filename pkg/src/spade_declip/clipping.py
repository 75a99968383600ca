"""Hard clipping, clip-mask detection and projection onto the consistent set."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .frames import DimensionError


class InconsistentClippingError(ValueError):
    """A sample exceeds the clipping threshold it was supposedly clipped at."""


def clip(x, theta):
    """Hard-clip ``x`` at ``+-theta``; samples with ``|x| >= theta`` saturate."""
    if theta <= 0:
        raise ValueError("clipping threshold must be positive")
    x = np.asarray(x, dtype=np.float64)
    return np.where(np.abs(x) < theta, x, theta * np.sign(x))


@dataclass(frozen=True)
class ClipMask:
    """Partition of sample indices into reliable, high-clipped and low-clipped.

    Stored as boolean arrays of equal length.
    """

    reliable: np.ndarray
    high: np.ndarray
    low: np.ndarray

    def __post_init__(self):
        r, h, l = (np.asarray(a, dtype=bool) for a in (self.reliable, self.high, self.low))
        if not (r.shape == h.shape == l.shape) or r.ndim != 1:
            raise DimensionError("mask arrays must be 1-D and of equal length")
        if np.any(r.astype(int) + h + l != 1):
            raise ValueError("reliable/high/low sets must partition the index range")
        object.__setattr__(self, "reliable", r)
        object.__setattr__(self, "high", h)
        object.__setattr__(self, "low", l)

    def __len__(self):
        return self.reliable.shape[0]

    @classmethod
    def from_codes(cls, codes):
        codes = np.asarray(codes)
        return cls(codes == 0, codes > 0, codes < 0)

    @property
    def codes(self):
        """int8 array: 0 reliable, +1 high, -1 low."""
        return (self.high.astype(np.int8) - self.low.astype(np.int8))

    @property
    def n_clipped(self):
        return int(np.count_nonzero(self.high) + np.count_nonzero(self.low))

    def __getitem__(self, idx):
        return ClipMask(self.reliable[idx], self.high[idx], self.low[idx])


def detect_mask(y, theta, tol=1e-12, snap=0.0):
    """Split ``y`` into reliable, high (``y >= theta``) and low (``y <= -theta``) sets.

    ``snap`` widens the clipped sets to ``|y| >= theta - snap``, for signals whose
    clipped samples were rounded on storage. Raises
    :class:`InconsistentClippingError` when ``|y| > theta + tol``.
    """
    y = np.asarray(y, dtype=np.float64)
    over = np.flatnonzero(np.abs(y) > theta + tol)
    if over.size:
        raise InconsistentClippingError(
            f"{over.size} samples exceed theta={theta} (first at index {over[0]})"
        )
    high = y >= theta - snap
    low = y <= -theta + snap
    return ClipMask(~(high | low), high, low)


def _as_codes(mask):
    if isinstance(mask, ClipMask):
        return mask.codes
    return np.ascontiguousarray(mask, dtype=np.int8)


def project_gamma(v, mask, y_block, thresholds):
    """Euclidean projection of ``v`` onto the set of clipping-consistent signals.

    Reliable samples are set to ``y_block``, high-clipped samples are raised to
    at least ``thresholds`` and low-clipped samples lowered to at most
    ``-thresholds``. ``mask`` is a :class:`ClipMask` or an int8 code array.
    """
    codes = _as_codes(mask)
    v = np.ascontiguousarray(v, dtype=np.float64)
    y_block = np.ascontiguousarray(y_block, dtype=np.float64)
    thresholds = np.ascontiguousarray(np.broadcast_to(thresholds, v.shape), dtype=np.float64)
    n = v.shape[0]
    if codes.shape[0] != n or y_block.shape[0] != n:
        raise DimensionError("project_gamma inputs must have equal lengths")
    return kernels.project_gamma_codes(v, codes, y_block, thresholds)


def gamma_violation(x, mask, y_block, thresholds):
    """Largest constraint violation of ``x`` against each membership condition.

    Returns ``(reliable, high, low)``: max ``|x - y|`` on reliable samples,
    max shortfall below ``thresholds`` on high samples, max excess above
    ``-thresholds`` on low samples (0 when satisfied).
    """
    codes = _as_codes(mask)
    x = np.asarray(x, dtype=np.float64)
    thr = np.broadcast_to(thresholds, x.shape)
    rel = codes == 0
    hi = codes > 0
    lo = codes < 0
    r = np.max(np.abs(x[rel] - np.asarray(y_block)[rel]), initial=0.0)
    h = np.max(thr[hi] - x[hi], initial=0.0)
    l = np.max(x[lo] + thr[lo], initial=0.0)
    return float(r), max(float(h), 0.0), max(float(l), 0.0)


def in_gamma(x, mask, y_block, thresholds, tol=1e-12):
    """Membership test: exact on reliable samples, ``tol`` slack on clipped ones."""
    r, h, l = gamma_violation(x, mask, y_block, thresholds)
    return r == 0.0 and h <= tol and l <= tol

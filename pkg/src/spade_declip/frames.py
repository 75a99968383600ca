"""Block segmentation, overlap-add, and the oversampled-DFT tight frame.

The analysis operator zero-pads an ``N``-sample block to ``P = R*N`` samples
and applies the unitary length-``P`` DFT. Its adjoint (the synthesis) is the
unitary inverse DFT truncated to the first ``N`` samples, so that
``synthesis(analysis(x)) == x`` for every block.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

logger = logging.getLogger(__name__)

WINDOWS = ("hann", "rect")


class DimensionError(ValueError):
    """Raised when an array does not have the length an operator expects."""


class SymmetryError(ValueError):
    """Raised when a spectrum is not conjugate-symmetric."""


def periodic_hann(n):
    """DFT-even Hann window of length ``n``."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


@dataclass(frozen=True)
class FrameSpec:
    """Block geometry and transform redundancy.

    Parameters
    ----------
    win_len : int
        Block length ``N`` in samples.
    hop : int
        Block advance in samples; must divide ``win_len``.
    redundancy : int
        Oversampling factor ``R`` of the DFT, ``P = R * win_len``.
    window : {"hann", "rect"}
        Analysis window applied to each block before processing.
    """

    win_len: int = 1024
    hop: int = 256
    redundancy: int = 1
    window: str = "hann"

    def __post_init__(self):
        if self.win_len < 1 or self.hop < 1:
            raise ValueError("win_len and hop must be positive")
        if self.hop > self.win_len or self.win_len % self.hop:
            raise ValueError(f"hop {self.hop} must divide win_len {self.win_len}")
        if self.redundancy < 1:
            raise ValueError("redundancy must be a positive integer")
        if self.window not in WINDOWS:
            raise ValueError(f"unknown window {self.window!r}, expected one of {WINDOWS}")
        cola = self.window_values.reshape(-1, self.hop).sum(axis=0)
        if cola.min() <= 0 or np.ptp(cola) > 1e-10 * cola.max():
            raise ValueError(
                f"{self.window} window of length {self.win_len} is not COLA at hop {self.hop}"
            )

    @property
    def n_coeffs(self):
        return self.redundancy * self.win_len

    @property
    def n_groups(self):
        """Number of conjugate-pair groups (half-spectrum bins)."""
        return self.n_coeffs // 2 + 1

    @property
    def pad(self):
        return self.win_len - self.hop

    @cached_property
    def window_values(self):
        if self.window == "hann":
            w = periodic_hann(self.win_len)
        else:
            w = np.ones(self.win_len)
        w.setflags(write=False)
        return w


@dataclass
class TimeSignal:
    """Sampled audio. ``samples`` is 1-D (mono) or ``(frames, channels)``.

    ``encoding`` records the on-disk sample format when read from a file.
    """

    samples: np.ndarray
    sample_rate: int
    encoding: str | None = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim not in (1, 2):
            raise DimensionError("samples must be 1-D or (frames, channels)")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("signal contains NaN or Inf")

    def __len__(self):
        return self.samples.shape[0]

    @property
    def n_channels(self):
        return 1 if self.samples.ndim == 1 else self.samples.shape[1]

    def channels(self):
        """List of 1-D per-channel sample arrays."""
        if self.samples.ndim == 1:
            return [self.samples]
        return [self.samples[:, c] for c in range(self.samples.shape[1])]


def _check_len(a, n, what):
    if a.ndim != 1 or a.shape[0] != n:
        raise DimensionError(f"{what} must have length {n}, got shape {a.shape}")


def analysis(x, spec):
    """Full length-``P`` coefficients of a real block (conjugate-symmetric)."""
    x = np.asarray(x, dtype=np.float64)
    _check_len(x, spec.win_len, "block")
    return np.fft.fft(x, n=spec.n_coeffs, norm="ortho")


def synthesis(z, spec, tol=1e-12):
    """Adjoint of :func:`analysis`: real block of length ``N``.

    Raises :class:`SymmetryError` if the result has an imaginary part larger
    than ``tol`` relative to the coefficient norm.
    """
    z = np.asarray(z, dtype=np.complex128)
    _check_len(z, spec.n_coeffs, "spectrum")
    x = np.fft.ifft(z, norm="ortho")[: spec.win_len]
    scale = max(1.0, float(np.linalg.norm(z)))
    if np.max(np.abs(x.imag), initial=0.0) > tol * scale:
        raise SymmetryError("synthesis of a non conjugate-symmetric spectrum")
    return x.real.copy()


def is_conjugate_symmetric(z, tol=1e-12):
    z = np.asarray(z)
    mirror = np.conj(np.roll(z[::-1], 1))
    scale = max(1.0, float(np.max(np.abs(z), initial=0.0)))
    return bool(np.max(np.abs(z - mirror), initial=0.0) <= tol * scale)


def full_to_half(z):
    """Bins ``0 .. P//2`` of a conjugate-symmetric spectrum."""
    z = np.asarray(z, dtype=np.complex128)
    return z[: z.shape[0] // 2 + 1].copy()


def half_to_full(zh, n_coeffs):
    """Rebuild the full spectrum from its half-spectrum bins."""
    zh = np.asarray(zh, dtype=np.complex128)
    full = np.empty(n_coeffs, dtype=np.complex128)
    full[: zh.shape[0]] = zh
    n_mirror = n_coeffs - zh.shape[0]
    full[zh.shape[0]:] = np.conj(zh[1 : n_mirror + 1][::-1])
    return full


class DFTFrame:
    """Tight-frame operators acting on half-spectra.

    Coefficients are stored as the ``P//2 + 1`` non-redundant bins of a
    conjugate-symmetric spectrum; :meth:`norm` returns the Euclidean norm of
    the corresponding full spectrum.
    """

    def __init__(self, spec):
        self.spec = spec
        self.n = spec.win_len
        self.p = spec.n_coeffs
        self.n_groups = spec.n_groups
        w = np.full(self.n_groups, 2.0)
        w[0] = 1.0
        if self.p % 2 == 0:
            w[-1] = 1.0
        self._weights = w
        self._even = self.p % 2 == 0

    def analysis(self, x):
        return np.fft.rfft(x, n=self.p, norm="ortho")

    def synthesis(self, zh):
        return np.fft.irfft(zh, n=self.p, norm="ortho")[: self.n]

    def norm(self, zh):
        s = 2.0 * np.vdot(zh, zh).real - zh[0].real ** 2 - zh[0].imag ** 2
        if self._even:
            s -= zh[-1].real ** 2 + zh[-1].imag ** 2
        return float(np.sqrt(max(s, 0.0)))

    def inner(self, ah, bh):
        """Real inner product of two conjugate-symmetric spectra."""
        return float(np.dot(self._weights, (np.conj(ah) * bh).real))


class CountingFrame(DFTFrame):
    """:class:`DFTFrame` that counts every analysis and synthesis call."""

    def __init__(self, spec):
        super().__init__(spec)
        self.n_analysis = 0
        self.n_synthesis = 0

    def analysis(self, x):
        self.n_analysis += 1
        return super().analysis(x)

    def synthesis(self, zh):
        self.n_synthesis += 1
        return super().synthesis(zh)


def n_blocks(length, spec):
    padded = length + 2 * spec.pad
    return 1 + -(-(padded - spec.win_len) // spec.hop)


def block_starts(length, spec):
    """Start index of every block relative to the (unpadded) signal."""
    return np.arange(n_blocks(length, spec)) * spec.hop - spec.pad


def padded_view(x, spec):
    """Zero-padded copy of ``x`` and the offset of sample 0 inside it."""
    x = np.asarray(x)
    nb = n_blocks(x.shape[0], spec)
    total = (nb - 1) * spec.hop + spec.win_len
    out = np.zeros(total, dtype=x.dtype)
    out[spec.pad : spec.pad + x.shape[0]] = x
    return out, spec.pad


def segment(x, spec):
    """Cut ``x`` into windowed blocks.

    Returns
    -------
    blocks : ndarray, shape (n_blocks, win_len)
    starts : ndarray of int
        ``blocks[b] = window * x[starts[b] : starts[b] + win_len]`` with
        samples outside the signal taken as zero.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] == 0:
        raise DimensionError("segment expects a non-empty 1-D signal")
    xp, _ = padded_view(x, spec)
    frames = np.lib.stride_tricks.sliding_window_view(xp, spec.win_len)[:: spec.hop]
    return frames * spec.window_values, block_starts(x.shape[0], spec)


def overlap_add(blocks, starts, spec, out_len):
    """Sum blocks at their starts and normalise by the accumulated window.

    Positions whose window sum is below ``1e-12`` are set to zero and a
    warning is logged.
    """
    blocks = np.asarray(blocks, dtype=np.float64)
    starts = np.asarray(starts)
    if blocks.ndim != 2 or blocks.shape[1] != spec.win_len or blocks.shape[0] != starts.shape[0]:
        raise DimensionError("blocks must be (n_blocks, win_len) matching starts")
    if np.any((starts + spec.pad) % spec.hop):
        raise ValueError("block starts are not on the hop grid")
    offset = spec.pad
    total = max(out_len + 2 * offset, int(starts.max(initial=0)) + offset + spec.win_len)
    acc = np.zeros(total)
    wsum = np.zeros(total)
    w = spec.window_values
    for b in np.argsort(starts, kind="stable"):
        lo = starts[b] + offset
        acc[lo : lo + spec.win_len] += blocks[b]
        wsum[lo : lo + spec.win_len] += w
    acc = acc[offset : offset + out_len]
    wsum = wsum[offset : offset + out_len]
    bad = wsum < 1e-12
    out = np.zeros(out_len)
    np.divide(acc, wsum, out=out, where=~bad)
    if bad.any():
        logger.warning("overlap_add: %d samples with no window coverage set to 0", int(bad.sum()))
    return out

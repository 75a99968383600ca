"""Pure-numpy fallback for the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def hard_threshold_half(c, k):
    """Keep the ``k`` largest entries of ``c`` by squared modulus.

    Ties at the cut-off value go to the lower index.
    """
    c = np.ascontiguousarray(c, dtype=np.complex128)
    n = c.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    if k <= 0:
        return out
    if k >= n:
        out[:] = c
        return out
    mag = c.real * c.real + c.imag * c.imag
    t = np.partition(mag, n - k)[n - k]
    keep = mag > t
    need = k - int(np.count_nonzero(keep))
    if need > 0:
        keep[np.flatnonzero(mag == t)[:need]] = True
    out[keep] = c[keep]
    return out


def project_gamma_codes(v, codes, y, thr):
    """Elementwise projection onto the clipping-consistent set.

    ``codes`` is 0 for reliable, +1 for high-clipped, -1 for low-clipped samples.
    """
    n = v.shape[0]
    if codes.shape[0] != n or y.shape[0] != n or thr.shape[0] != n:
        raise ValueError("length mismatch in project_gamma")
    return np.where(
        codes == 0,
        y,
        np.where(codes > 0, np.maximum(v, thr), np.minimum(v, -thr)),
    )

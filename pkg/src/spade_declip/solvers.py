"""Per-block SPADE declipping solvers.

Three ADMM-type iterations that alternate a hard-thresholding step in the
coefficient domain with a projection onto the clipping-consistent set:

* :func:`a_spade_block` - analysis-model SPADE.
* :func:`s_spade_original_block` - the original synthesis variant, whose
  projection is carried out over coefficients.
* :func:`s_spade_proposed_block` - the synthesis variant whose projection is a
  time-domain elementwise mapping.

All three perform exactly one analysis and one synthesis per iteration.
Coefficients are handled as half-spectra (see :class:`~.frames.DFTFrame`), so
conjugate symmetry of every iterate holds by construction.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .clipping import _as_codes
from .frames import DFTFrame, DimensionError, SymmetryError, full_to_half, half_to_full, is_conjugate_symmetric


class Variant(str, enum.Enum):
    ASPADE = "aspade"
    SSPADE_O = "sspade-o"
    SSPADE_DP = "sspade-dp"

    @property
    def label(self):
        return {"aspade": "A-SPADE", "sspade-o": "S-SPADE_O", "sspade-dp": "S-SPADE_DP"}[self.value]


class Termination(str, enum.Enum):
    EPSILON = "epsilon"
    ITERATION_CAP = "iteration_cap"


@dataclass(frozen=True)
class SpadeConfig:
    """Solver settings.

    ``s`` is the sparsity increment, ``r`` the number of iterations between
    increments and ``epsilon`` the absolute residual tolerance. ``max_iter``
    defaults to enough iterations for the sparsity level to reach the full
    half-spectrum.
    """

    variant: Variant = Variant.ASPADE
    s: int = 1
    r: int = 1
    epsilon: float = 0.1
    max_iter: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.s < 1 or self.r < 1:
            raise ValueError("s and r must be >= 1")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def iteration_cap(self, n_groups):
        if self.max_iter is not None:
            return self.max_iter
        return self.r * math.ceil(n_groups / self.s)


@dataclass
class BlockResult:
    restored: np.ndarray
    iterations: int
    final_residual: float
    final_k: int
    terminated_by: Termination
    snapshots: dict = field(default_factory=dict, repr=False)


def relaxation_schedule(i, s, r):
    """Sparsity level used at 0-based iteration ``i``."""
    if i < 0:
        raise ValueError("iteration index must be >= 0")
    return s * (1 + i // r)


def hard_threshold(z, k):
    """Keep the ``k`` largest conjugate-pair groups of a full spectrum.

    DC and (for even length) Nyquist bins are singleton groups; every other
    bin is grouped with its mirror. Ties go to the lower bin index.
    """
    z = np.asarray(z, dtype=np.complex128)
    if k < 0:
        raise ValueError("k must be >= 0")
    if not is_conjugate_symmetric(z):
        raise SymmetryError("hard_threshold expects a conjugate-symmetric spectrum")
    zh = kernels.hard_threshold_half(full_to_half(z), int(k))
    return half_to_full(zh, z.shape[0])


def _prepare(y_block, mask, thresholds, spec):
    y = np.ascontiguousarray(y_block, dtype=np.float64)
    codes = np.ascontiguousarray(_as_codes(mask))
    thr = np.ascontiguousarray(np.broadcast_to(thresholds, y.shape), dtype=np.float64)
    if y.shape != (spec.win_len,) or codes.shape != y.shape:
        raise DimensionError(f"block inputs must have length {spec.win_len}")
    return y, codes, thr


def _run(state, cfg, n_groups, n_iter, checkpoints, snapshot):
    """Shared outer loop: relaxation schedule, stopping rule and snapshots."""
    fixed = n_iter is not None
    cap = n_iter if fixed else cfg.iteration_cap(n_groups)
    checkpoints = set(checkpoints or ())
    snapshots = {}
    residual = math.inf
    k = cfg.s
    for i in range(cap):
        k = relaxation_schedule(i, cfg.s, cfg.r)
        residual = state(k)
        if i + 1 in checkpoints:
            snapshots[i + 1] = snapshot(state)
        if not fixed and residual <= cfg.epsilon:
            return BlockResult(snapshot(state), i + 1, residual, k, Termination.EPSILON, snapshots)
        state.dual_update()
    return BlockResult(snapshot(state), cap, residual, k, Termination.ITERATION_CAP, snapshots)


class _ASpadeState:
    def __init__(self, frame, y, codes, thr):
        self.frame, self.y, self.codes, self.thr = frame, y, codes, thr
        self.x = y.copy()
        self.ax = frame.analysis(self.x)
        self.u = np.zeros_like(self.ax)
        self.diff = None

    def __call__(self, k):
        f = self.frame
        zbar = kernels.hard_threshold_half(self.ax + self.u, k)
        self.x = kernels.project_gamma_codes(f.synthesis(zbar - self.u), self.codes, self.y, self.thr)
        self.ax = f.analysis(self.x)
        self.diff = self.ax - zbar
        return f.norm(self.diff)

    def dual_update(self):
        self.u += self.diff


class _SSpadeOriginalState:
    def __init__(self, frame, y, codes, thr):
        self.frame, self.y, self.codes, self.thr = frame, y, codes, thr
        self.x = y.copy()
        self.zhat = frame.analysis(y)
        self.u = np.zeros_like(self.zhat)
        self.diff = None

    def __call__(self, k):
        zbar = kernels.hard_threshold_half(self.zhat + self.u, k)
        self.zhat, self.x = project_coefficients(
            zbar - self.u, self.frame, self.codes, self.y, self.thr
        )
        self.diff = self.zhat - zbar
        return self.frame.norm(self.diff)

    def dual_update(self):
        self.u += self.diff


class _SSpadeProposedState:
    def __init__(self, frame, y, codes, thr):
        self.frame, self.y, self.codes, self.thr = frame, y, codes, thr
        self.x = y.copy()
        self.u = np.zeros_like(y)
        self.diff = None

    def __call__(self, k):
        f = self.frame
        zbar = kernels.hard_threshold_half(f.analysis(self.x - self.u), k)
        dz = f.synthesis(zbar)
        self.x = kernels.project_gamma_codes(dz + self.u, self.codes, self.y, self.thr)
        self.diff = dz - self.x
        return float(np.linalg.norm(self.diff))

    def dual_update(self):
        self.u += self.diff


def project_coefficients(w, frame, mask, y_block, thresholds):
    """Closest half-spectrum to ``w`` whose synthesis lies in the consistent set.

    For a Parseval tight frame the minimiser is
    ``w + D*(P(Dw) - Dw)``, with ``P`` the time-domain projection; its
    synthesis equals ``P(Dw)``. Costs one synthesis and one analysis.

    Returns ``(z_hat, x)`` with ``x = D z_hat``.
    """
    codes = _as_codes(mask)
    dw = frame.synthesis(w)
    x = kernels.project_gamma_codes(dw, codes, y_block, thresholds)
    return w + frame.analysis(x - dw), x


_STATES = {
    Variant.ASPADE: _ASpadeState,
    Variant.SSPADE_O: _SSpadeOriginalState,
    Variant.SSPADE_DP: _SSpadeProposedState,
}


def solve_block(y_block, mask, thresholds, spec, cfg, *, frame=None, n_iter=None, checkpoints=None):
    """Declip one windowed block with the variant selected in ``cfg``.

    Parameters
    ----------
    y_block : ndarray
        Observed (windowed) block of length ``spec.win_len``.
    mask : ClipMask or ndarray of int8
        Clip mask of the block (0 reliable, +1 high, -1 low).
    thresholds : float or ndarray
        Per-sample clipping levels (``theta * window`` for windowed blocks).
    frame : DFTFrame, optional
        Operator to use; pass a :class:`~.frames.CountingFrame` to count
        transforms.
    n_iter : int, optional
        Run exactly this many iterations and ignore ``epsilon``.
    checkpoints : iterable of int, optional
        Iteration counts at which to store a copy of the restored block in
        ``BlockResult.snapshots``.
    """
    y, codes, thr = _prepare(y_block, mask, thresholds, spec)
    if n_iter is not None and n_iter < 1:
        raise ValueError("n_iter must be >= 1")
    frame = frame if frame is not None else DFTFrame(spec)
    state = _STATES[cfg.variant](frame, y, codes, thr)
    return _run(state, cfg, frame.n_groups, n_iter, checkpoints, lambda st: st.x.copy())


def _check_variant(cfg, variant):
    if cfg is None:
        return SpadeConfig(variant=variant)
    if cfg.variant is not variant:
        raise ValueError(f"config variant {cfg.variant.value} does not match {variant.value}")
    return cfg


def a_spade_block(y_block, mask, thresholds, spec, cfg=None, **kwargs):
    """A-SPADE on one block; see :func:`solve_block`."""
    cfg = _check_variant(cfg, Variant.ASPADE)
    return solve_block(y_block, mask, thresholds, spec, cfg, **kwargs)


def s_spade_original_block(y_block, mask, thresholds, spec, cfg=None, **kwargs):
    """Original S-SPADE on one block; see :func:`solve_block`."""
    cfg = _check_variant(cfg, Variant.SSPADE_O)
    return solve_block(y_block, mask, thresholds, spec, cfg, **kwargs)


def s_spade_proposed_block(y_block, mask, thresholds, spec, cfg=None, **kwargs):
    """Proposed S-SPADE on one block; see :func:`solve_block`."""
    cfg = _check_variant(cfg, Variant.SSPADE_DP)
    return solve_block(y_block, mask, thresholds, spec, cfg, **kwargs)


# Setup transforms issued before the first iteration, per variant.
SETUP_TRANSFORMS = {
    Variant.ASPADE: {"analysis": 1, "synthesis": 0},
    Variant.SSPADE_O: {"analysis": 1, "synthesis": 0},
    Variant.SSPADE_DP: {"analysis": 0, "synthesis": 0},
}

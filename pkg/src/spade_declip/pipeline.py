"""Whole-signal declipping: segment, solve clipped blocks, overlap-add."""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .clipping import detect_mask
from .frames import DFTFrame, overlap_add, padded_view, segment
from .solvers import solve_block


@dataclass
class DeclipReport:
    restored: np.ndarray
    per_block: list
    total_blocks: int
    skipped_blocks: int
    wall_time: float
    # block index of each entry in per_block
    solved_index: list = field(default_factory=list, repr=False)
    checkpoints: dict = field(default_factory=dict, repr=False)

    @property
    def mean_iterations(self):
        if not self.per_block:
            return 0.0
        return float(np.mean([r.iterations for r in self.per_block]))


@dataclass(frozen=True)
class BlockProblem:
    """Constraints of one windowed block."""

    index: int
    start: int
    y_block: np.ndarray
    codes: np.ndarray
    thresholds: np.ndarray

    @property
    def has_clipped(self):
        return bool(np.any(self.codes))


def block_problems(y, theta, spec, mask=None):
    """Windowed blocks of ``y`` with their sliced masks and per-sample thresholds.

    Padding and zero-window positions are reliable with value 0.
    """
    y = np.asarray(y, dtype=np.float64)
    if mask is None:
        mask = detect_mask(y, theta)
    blocks, starts = segment(y, spec)
    codes_p, _ = padded_view(mask.codes, spec)
    w = spec.window_values
    thr = theta * w
    zero_w = w == 0
    out = []
    for b, start in enumerate(starts):
        lo = b * spec.hop
        codes = codes_p[lo : lo + spec.win_len].copy()
        codes[zero_w] = 0
        out.append(BlockProblem(b, int(start), blocks[b], codes, thr))
    return out


def _declip(y, theta, spec, cfg, n_iter=None, checkpoints=None, n_jobs=1, tol=1e-12, snap=0.0):
    t0 = time.perf_counter()
    y = np.asarray(y, dtype=np.float64)
    mask = detect_mask(y, theta, tol=tol, snap=snap)
    problems = block_problems(y, theta, spec, mask)
    todo = [p for p in problems if p.has_clipped]

    def solve(p):
        return solve_block(
            p.y_block, p.codes, p.thresholds, spec, cfg,
            frame=DFTFrame(spec), n_iter=n_iter, checkpoints=checkpoints,
        )

    if n_jobs > 1 and len(todo) > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            results = list(pool.map(solve, todo))
    else:
        results = [solve(p) for p in todo]

    starts = np.array([p.start for p in problems])
    base = np.stack([p.y_block for p in problems])

    def assemble(solved_blocks):
        blocks = base.copy()
        for p, xb in zip(todo, solved_blocks):
            blocks[p.index] = xb
        out = overlap_add(blocks, starts, spec, y.shape[0])
        out[mask.reliable] = y[mask.reliable]
        return out

    restored = assemble([r.restored for r in results])
    snaps = {}
    for n in sorted(checkpoints or ()):
        snaps[n] = assemble([r.snapshots[n] for r in results])
    return DeclipReport(
        restored=restored,
        per_block=results,
        total_blocks=len(problems),
        skipped_blocks=len(problems) - len(todo),
        wall_time=time.perf_counter() - t0,
        solved_index=[p.index for p in todo],
        checkpoints=snaps,
    )


def declip(y, theta, spec, cfg, n_jobs=1, tol=1e-12, snap=0.0):
    """Restore a hard-clipped mono signal.

    Blocks without clipped samples pass through unchanged. After overlap-add
    the reliable samples are reset to ``y`` so the output is consistent with
    the observation. ``tol`` and ``snap`` are passed to
    :func:`~.clipping.detect_mask`.
    """
    return _declip(y, theta, spec, cfg, n_jobs=n_jobs, tol=tol, snap=snap)


def declip_fixed_iterations(y, theta, spec, cfg, n_iter, n_jobs=1, tol=1e-12, snap=0.0):
    """Like :func:`declip`, but every block runs exactly ``n_iter`` iterations."""
    if n_iter < 1:
        raise ValueError("n_iter must be >= 1")
    return _declip(y, theta, spec, cfg, n_iter=n_iter, n_jobs=n_jobs, tol=tol, snap=snap)


def declip_iteration_grid(y, theta, spec, cfg, grid, n_jobs=1):
    """Fixed-iteration restorations for every count in ``grid`` from a single run.

    Equivalent to calling :func:`declip_fixed_iterations` once per grid point,
    since the fixed-iteration path is deterministic and ignores ``epsilon``.
    Returns ``{n_iter: restored}``.
    """
    grid = sorted(set(int(g) for g in grid))
    if not grid or grid[0] < 1:
        raise ValueError("iteration grid must be non-empty and positive")
    report = _declip(y, theta, spec, cfg, n_iter=grid[-1], checkpoints=grid, n_jobs=n_jobs)
    return report.checkpoints

"""Experiment sweeps: clipping-threshold sweep, iteration sweep, block scatter."""

import csv
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from .clipping import clip
from .frames import FrameSpec, TimeSignal
from .metrics import delta_sdr, sdr
from .pipeline import declip, declip_iteration_grid
from .signals import peak_normalize
from .solvers import SpadeConfig, Variant
from .wavio import WavFormatError, wav_read

logger = logging.getLogger(__name__)

THETA_GRID = tuple(round(0.1 * i, 1) for i in range(1, 10))
ITERATION_GRID = tuple(range(10, 201, 10))
SCATTER_BLOCK = 2048


@dataclass
class SweepRow:
    algorithm: str
    redundancy: int
    theta_c: float
    delta_sdr_db: float
    avg_iterations: float
    wall_time_s: float


@dataclass
class IterationRow:
    algorithm: str
    redundancy: int
    iterations: int
    delta_sdr_db: float


@dataclass
class ScatterRow:
    block_start: int
    sdr_a_db: float
    sdr_b_db: float


def default_cfg_set(redundancies=(1, 2, 4), epsilon=0.1, s=1, r=1):
    """Every (config, redundancy) pair: the three variants at each redundancy."""
    return [
        (SpadeConfig(variant=v, s=s, r=r, epsilon=epsilon), red)
        for red in redundancies
        for v in Variant
    ]


def _channels(sig):
    if isinstance(sig, TimeSignal):
        samples = sig.samples
    else:
        samples = np.asarray(sig, dtype=np.float64)
    samples = peak_normalize(samples)
    if samples.ndim == 1:
        return [samples]
    return [samples[:, c] for c in range(samples.shape[1])]


def _threshold_cell(args):
    channels, theta, spec, cfg = args
    t0 = time.perf_counter()
    dsdr, iters, clipped_any = [], [], False
    for x in channels:
        y = clip(x, theta)
        if np.array_equal(x, y):
            continue
        clipped_any = True
        rep = declip(y, theta, spec, cfg)
        dsdr.append(delta_sdr(x, y, rep.restored))
        iters.extend(r.iterations for r in rep.per_block)
    return (
        float(np.mean(dsdr)) if dsdr else None,
        float(np.mean(iters)) if iters else 0.0,
        time.perf_counter() - t0,
        clipped_any,
    )


def _map(fn, jobs, n_jobs):
    if n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(n_jobs) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def run_threshold_sweep(signals, spec=None, cfg_set=None, thetas=THETA_GRID, n_jobs=1):
    """Average ΔSDR over ``signals`` for each (config, redundancy, theta) cell.

    Every signal is peak-normalised, clipped at each threshold and declipped.
    Multichannel signals are processed per channel and their ΔSDR averaged.
    A threshold that clips none of the signals yields ``delta_sdr_db = 0``
    and a logged warning.
    """
    spec = spec or FrameSpec()
    cfg_set = cfg_set or default_cfg_set()
    if not signals:
        raise ValueError("threshold sweep needs at least one signal")
    per_signal = [_channels(s) for s in signals]
    keys = [(cfg, red, theta) for cfg, red in cfg_set for theta in thetas]
    jobs = [
        (ch, theta, replace(spec, redundancy=red), cfg)
        for cfg, red, theta in keys
        for ch in per_signal
    ]
    results = _map(_threshold_cell, jobs, n_jobs)
    rows = []
    n = len(per_signal)
    for j, (cfg, red, theta) in enumerate(keys):
        cell = results[j * n : (j + 1) * n]
        vals = [c[0] for c in cell if c[0] is not None]
        iters = [c[1] for c in cell if c[3]]
        if not vals:
            logger.warning("theta=%s clips none of the signals; ΔSDR reported as 0", theta)
        rows.append(SweepRow(
            algorithm=cfg.variant.value,
            redundancy=red,
            theta_c=theta,
            delta_sdr_db=float(np.mean(vals)) if vals else 0.0,
            avg_iterations=float(np.mean(iters)) if iters else 0.0,
            wall_time_s=float(sum(c[2] for c in cell)),
        ))
    return rows


def _iteration_cell(args):
    channels, theta, spec, cfg, grid = args
    out = {g: [] for g in grid}
    for x in channels:
        y = clip(x, theta)
        if np.array_equal(x, y):
            continue
        snaps = declip_iteration_grid(y, theta, spec, cfg, grid)
        for g in grid:
            out[g].append(delta_sdr(x, y, snaps[g]))
    return {g: float(np.mean(v)) if v else None for g, v in out.items()}


def run_iteration_sweep(signals, spec=None, cfg_set=None, iteration_grid=ITERATION_GRID,
                        thetas=THETA_GRID, n_jobs=1):
    """Average ΔSDR versus a fixed per-block iteration count.

    The average runs over signals and clipping thresholds ``thetas``.
    """
    spec = spec or FrameSpec()
    cfg_set = cfg_set or default_cfg_set()
    grid = sorted(set(int(g) for g in iteration_grid))
    if not grid:
        raise ValueError("iteration grid must be non-empty")
    per_signal = [_channels(s) for s in signals]
    jobs = [
        (ch, theta, replace(spec, redundancy=red), cfg, grid)
        for cfg, red in cfg_set
        for theta in thetas
        for ch in per_signal
    ]
    results = _map(_iteration_cell, jobs, n_jobs)
    per_cfg = len(thetas) * len(per_signal)
    rows = []
    for j, (cfg, red) in enumerate(cfg_set):
        cells = results[j * per_cfg : (j + 1) * per_cfg]
        for g in grid:
            vals = [c[g] for c in cells if c[g] is not None]
            rows.append(IterationRow(cfg.variant.value, red, g, float(np.mean(vals)) if vals else 0.0))
    return rows


def run_block_scatter(x, y, x_hat_a, x_hat_b, block=SCATTER_BLOCK, only_clipped=False):
    """Per-block SDR of two restorations on consecutive non-overlapping blocks.

    A trailing partial block is dropped. With ``only_clipped`` blocks where
    ``y`` equals ``x`` are omitted.
    """
    arrays = [np.asarray(a, dtype=np.float64) for a in (x, y, x_hat_a, x_hat_b)]
    if len({a.shape for a in arrays}) != 1:
        raise ValueError("scatter inputs must have equal lengths")
    x, y, xa, xb = arrays
    rows = []
    for start in range(0, x.shape[0] - block + 1, block):
        sl = slice(start, start + block)
        if only_clipped and np.array_equal(x[sl], y[sl]):
            continue
        if not np.any(x[sl]):
            continue
        rows.append(ScatterRow(start, sdr(x[sl], xa[sl]), sdr(x[sl], xb[sl])))
    return rows


def _fmt(v):
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def write_csv(path, rows, row_type=None, timing=True):
    """Write dataclass rows with a header; ``timing=False`` blanks ``wall_time_s``.

    Floats use the shortest round-trip representation and infinities are
    written as ``inf``.
    """
    if row_type is None:
        if not rows:
            raise ValueError("cannot infer the schema of an empty row list")
        row_type = type(rows[0])
    names = [f.name for f in fields(row_type)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in rows:
            d = asdict(row)
            if not timing and "wall_time_s" in d:
                d["wall_time_s"] = ""
            w.writerow([_fmt(d[n]) for n in names])


def load_corpus(directory):
    """Read every ``*.wav`` in ``directory``; unreadable files are logged and skipped."""
    out = []
    for path in sorted(Path(directory).glob("*.wav")):
        try:
            out.append((path.name, wav_read(path)))
        except (OSError, WavFormatError, ValueError) as exc:
            logger.error("skipping %s: %s", path, exc)
    return out

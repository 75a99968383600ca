"""Compare the compiled and numpy kernel backends.

Times the two hot kernels in isolation and a full per-block solve with each
backend patched in. Run with ``python3 benchmarks/bench_kernels.py``.
"""

import argparse
import timeit

import numpy as np

from spade_declip import kernels
from spade_declip.clipping import clip, detect_mask
from spade_declip.frames import FrameSpec
from spade_declip.pipeline import block_problems
from spade_declip.signals import note_sequence
from spade_declip.solvers import SpadeConfig, Variant, solve_block


def _best(fn, number):
    return min(timeit.repeat(fn, number=number, repeat=5)) / number


def _use(module):
    kernels.hard_threshold_half = module.hard_threshold_half
    kernels.project_gamma_codes = module.project_gamma_codes


def bench_kernels(backends, redundancy, number):
    spec = FrameSpec(redundancy=redundancy)
    rng = np.random.default_rng(0)
    g = spec.n_groups
    c = rng.standard_normal(g) + 1j * rng.standard_normal(g)
    c[0] = c[0].real
    n = spec.win_len
    v = rng.standard_normal(n)
    codes = rng.integers(-1, 2, n).astype(np.int8)
    y = np.where(codes == 0, rng.standard_normal(n), 0.0)
    thr = np.full(n, 0.3)
    k = g // 8
    out = {}
    for name, mod in backends.items():
        out[name] = (
            _best(lambda: mod.hard_threshold_half(c, k), number),
            _best(lambda: mod.project_gamma_codes(v, codes, y, thr), number),
        )
    return out


def bench_solve(backends, redundancy, n_blocks, repeat=7):
    spec = FrameSpec(redundancy=redundancy)
    theta = 0.3
    y = clip(note_sequence(2.0, rng=3), theta)
    probs = [p for p in block_problems(y, theta, spec, detect_mask(y, theta)) if p.has_clipped]
    probs = probs[:n_blocks]
    out = {name: {} for name in backends}
    saved = (kernels.hard_threshold_half, kernels.project_gamma_codes)
    try:
        for variant in Variant:
            cfg = SpadeConfig(variant)

            def run():
                for p in probs:
                    solve_block(p.y_block, p.codes, p.thresholds, spec, cfg, n_iter=100)

            best = dict.fromkeys(backends, float("inf"))
            # interleave backends so load changes hit both alike
            for _ in range(repeat):
                for name, mod in backends.items():
                    _use(mod)
                    best[name] = min(best[name], timeit.timeit(run, number=1))
            for name in backends:
                out[name][variant.value] = best[name] / len(probs)
    finally:
        kernels.hard_threshold_half, kernels.project_gamma_codes = saved
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--redundancy", type=int, nargs="+", default=[1, 2, 4])
    ap.add_argument("--number", type=int, default=2000, help="kernel calls per timing")
    ap.add_argument("--blocks", type=int, default=20, help="blocks per solve timing")
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    print(f"default backend: {kernels.BACKEND}; available: {', '.join(backends)}")
    if "cython" not in backends:
        print("compiled extension not built; only the numpy fallback is timed")

    print("\nkernel timings (us per call)")
    print(f"{'R':>2} {'backend':>8} {'threshold':>10} {'project':>10}")
    for red in args.redundancy:
        for name, (t_thr, t_proj) in bench_kernels(backends, red, args.number).items():
            print(f"{red:>2} {name:>8} {t_thr * 1e6:>10.2f} {t_proj * 1e6:>10.2f}")

    print("\nblock solve, 100 fixed iterations (ms per block)")
    print(f"{'R':>2} {'backend':>8} " + " ".join(f"{v.value:>10}" for v in Variant))
    for red in args.redundancy:
        for name, row in bench_solve(backends, red, args.blocks).items():
            print(f"{red:>2} {name:>8} " + " ".join(f"{row[v.value] * 1e3:>10.2f}" for v in Variant))


if __name__ == "__main__":
    main()

"""Command-line front end: ``spade-declip {clip,declip,eval,sweep,scatter}``."""

import argparse
import logging
import math
import sys

import numpy as np

from .clipping import InconsistentClippingError, clip
from .frames import FrameSpec, TimeSignal
from .metrics import delta_sdr, sdr
from .pipeline import declip, declip_fixed_iterations
from .signals import synthetic_corpus
from .solvers import SpadeConfig, Variant
from .sweeps import (
    ITERATION_GRID, SCATTER_BLOCK, THETA_GRID, load_corpus, run_block_scatter,
    run_iteration_sweep, run_threshold_sweep, write_csv,
)
from .wavio import WavFormatError, wav_read, wav_write

EXIT_FORMAT = 2
EXIT_INCONSISTENT = 3

log = logging.getLogger("spade_declip")


def _stack(channels, like):
    if like.samples.ndim == 1:
        return channels[0]
    return np.stack(channels, axis=1)


def cmd_clip(args):
    sig = wav_read(args.input)
    out = clip(sig.samples, args.theta)
    wav_write(args.output, TimeSignal(out, sig.sample_rate))
    return 0


def storage_tolerance(theta, encoding):
    """Rounding margin of a clipping level stored in the given sample format."""
    if encoding == "pcm16":
        return 0.5 / 32768.0 + 1e-12
    if encoding == "float32":
        return theta * 2.0 ** -23
    return 1e-12


def cmd_declip(args):
    sig = wav_read(args.input)
    tol = storage_tolerance(args.theta, sig.encoding)
    spec = FrameSpec(args.win, args.hop, args.redundancy, args.window)
    cfg = SpadeConfig(Variant(args.algorithm), s=args.s, r=args.r, epsilon=args.epsilon)
    restored = []
    for c, y in enumerate(sig.channels()):
        if args.fixed_iter is not None:
            rep = declip_fixed_iterations(
                y, args.theta, spec, cfg, args.fixed_iter, n_jobs=args.jobs, tol=tol, snap=tol
            )
        else:
            rep = declip(y, args.theta, spec, cfg, n_jobs=args.jobs, tol=tol, snap=tol)
        log.info(
            "channel %d: %d blocks, %d solved, mean %.1f iterations, %.2f s",
            c, rep.total_blocks, len(rep.per_block), rep.mean_iterations, rep.wall_time,
        )
        restored.append(rep.restored)
    wav_write(args.output, TimeSignal(_stack(restored, sig), sig.sample_rate))
    return 0


def _fmt_db(v):
    return "inf" if math.isinf(v) else f"{v:.4f}"


def cmd_eval(args):
    x, y, xh = (wav_read(p) for p in (args.original, args.clipped, args.restored))
    if not (x.samples.shape == y.samples.shape == xh.samples.shape):
        print("error: signals differ in length or channel count", file=sys.stderr)
        return EXIT_FORMAT
    before, after, gains = [], [], []
    for xc, yc, hc in zip(x.channels(), y.channels(), xh.channels()):
        before.append(sdr(xc, yc))
        after.append(sdr(xc, hc))
        gains.append(delta_sdr(xc, yc, hc))
    print(f"SDR clipped   [dB]: {_fmt_db(float(np.mean(before)))}")
    print(f"SDR restored  [dB]: {_fmt_db(float(np.mean(after)))}")
    print(f"delta SDR     [dB]: {_fmt_db(float(np.mean(gains)))}")
    return 0


def _cfg_set(args):
    return [
        (SpadeConfig(Variant(a), s=args.s, r=args.r, epsilon=args.epsilon), red)
        for red in args.redundancy
        for a in args.algorithms
    ]


def cmd_sweep(args):
    if args.corpus:
        signals = [sig for _, sig in load_corpus(args.corpus)]
        if not signals:
            print(f"error: no readable WAV files in {args.corpus}", file=sys.stderr)
            return EXIT_FORMAT
    else:
        signals = synthetic_corpus(args.synthetic, seed=args.seed)
    spec = FrameSpec(args.win, args.hop, 1, args.window)
    if args.mode == "threshold":
        rows = run_threshold_sweep(signals, spec, _cfg_set(args), args.thetas, n_jobs=args.jobs)
    else:
        rows = run_iteration_sweep(
            signals, spec, _cfg_set(args), args.iterations, args.thetas, n_jobs=args.jobs
        )
    write_csv(args.out, rows, timing=not args.no_timing)
    return 0


def cmd_scatter(args):
    sigs = [wav_read(p) for p in (args.original, args.clipped, args.restored_a, args.restored_b)]
    chans = [s.channels()[args.channel] for s in sigs]
    rows = run_block_scatter(*chans, block=args.blocks, only_clipped=args.only_clipped)
    write_csv(args.out, rows)
    return 0


def _add_frame_args(p):
    p.add_argument("--win", type=int, default=1024, help="block length in samples")
    p.add_argument("--hop", type=int, default=256, help="hop size in samples")
    p.add_argument("--window", choices=["hann", "rect"], default="hann")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--s", type=int, default=1, help="sparsity increment")
    p.add_argument("--r", type=int, default=1, help="iterations between increments")
    p.add_argument("--jobs", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(prog="spade-declip", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("clip", help="hard-clip a WAV file")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_clip)

    p = sub.add_parser("declip", help="restore a hard-clipped WAV file")
    p.add_argument("--algorithm", choices=[v.value for v in Variant], default="aspade")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--redundancy", type=int, default=1)
    p.add_argument("--fixed-iter", type=int, default=None,
                   help="run exactly N iterations per block, ignoring epsilon")
    _add_frame_args(p)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_declip)

    p = sub.add_parser("eval", help="print SDR and delta SDR")
    p.add_argument("--original", required=True)
    p.add_argument("--clipped", required=True)
    p.add_argument("--restored", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="threshold or iteration sweep to CSV")
    p.add_argument("--mode", choices=["threshold", "iterations"], default="threshold")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--corpus", help="directory of WAV files")
    src.add_argument("--synthetic", type=int, metavar="N", help="use N synthetic note-sequence signals")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--algorithms", nargs="+", choices=[v.value for v in Variant],
                   default=[v.value for v in Variant])
    p.add_argument("--redundancy", type=int, nargs="+", default=[1, 2, 4])
    p.add_argument("--thetas", type=float, nargs="+", default=list(THETA_GRID))
    p.add_argument("--iterations", type=int, nargs="+", default=list(ITERATION_GRID))
    p.add_argument("--no-timing", action="store_true", help="leave wall_time_s blank")
    _add_frame_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("scatter", help="per-block SDR of two restorations to CSV")
    p.add_argument("--blocks", type=int, default=SCATTER_BLOCK)
    p.add_argument("--original", required=True)
    p.add_argument("--clipped", required=True)
    p.add_argument("--restored-a", required=True)
    p.add_argument("--restored-b", required=True)
    p.add_argument("--channel", type=int, default=0)
    p.add_argument("--only-clipped", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scatter)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except WavFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except InconsistentClippingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())

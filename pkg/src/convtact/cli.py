"""Command line front end.

Exit codes: 0 success, 1 usage error, 2 unreadable or malformed data.

Tensor files are picked by suffix: .ndt for raw float64 tensors, .pgm for
8/16-bit grayscale images (read) and 8-bit (write, values clamped to [0, 1]).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import synth as synth_mod
from . import ttc as ttc_mod
from .config import CONFIG_NAME, load_threshold
from .conv import BoundaryPolicy, ConvMethod, ConvShape, conv_auto
from .kernels import KERNELS, gradient
from .tensor import FormatError, image_read_pgm, image_write_pgm, tensor_read, tensor_write


def _read_any(path) -> np.ndarray:
    p = Path(path)
    if p.suffix.lower() == ".pgm":
        return image_read_pgm(p)
    return tensor_read(p)


def _write_any(t: np.ndarray, path) -> None:
    p = Path(path)
    if p.suffix.lower() == ".pgm":
        if t.ndim != 2:
            raise ValueError(f"PGM output needs a 2-D result, got ndim {t.ndim}")
        image_write_pgm(t, p)
    else:
        tensor_write(t, p)


def _cmd_conv(args) -> int:
    signal = _read_any(args.input)
    kernel = _read_any(args.kernel)
    out, chosen = conv_auto(
        signal,
        kernel,
        shape=ConvShape(args.shape),
        boundary=BoundaryPolicy(args.boundary),
        method=ConvMethod(args.method),
        threshold=load_threshold("."),
    )
    print(f"conv: backend={chosen.value}", file=sys.stderr)
    _write_any(out, args.out)
    return 0


def _cmd_gradient(args) -> int:
    img = _read_any(args.input)
    field = gradient(img, args.kernel)
    for name, data in (("ex", field.ex), ("ey", field.ey), ("mag", field.mag), ("dir", field.dir)):
        path = f"{args.out_prefix}_{name}.{args.format}"
        if args.format == "pgm":
            lo, hi = data.min(), data.max()
            scaled = (data - lo) / (hi - lo) if hi > lo else np.zeros_like(data)
            image_write_pgm(scaled, path)
        else:
            tensor_write(data, path)
    return 0


def _load_frames(path) -> np.ndarray:
    p = Path(path)
    if p.is_dir():
        files = sorted(p.glob("frame_*.pgm"))
        if not files:
            raise FormatError(f"{p}: no frame_*.pgm files")
        return np.stack([image_read_pgm(f) for f in files])
    stack = tensor_read(p)
    if stack.ndim != 3:
        raise FormatError(f"{p}: frame stack must be 3-D, got ndim {stack.ndim}")
    return stack


def _cmd_ttc(args) -> int:
    frames = _load_frames(args.frames)
    if args.multiscale:
        estimates = ttc_mod.run_sequence(frames, max_level=args.max_level)
    else:
        estimates = ttc_mod.run_sequence(frames, level=args.level)
    if args.csv:
        ttc_mod.write_trace(estimates, args.csv)
    else:
        sys.stdout.write("\n".join(ttc_mod.trace_lines(estimates)) + "\n")
    return 0


def _cmd_synth(args) -> int:
    w, h = args.size
    cfg = synth_mod.SynthConfig(
        width=w,
        height=h,
        frames=args.frames,
        t0=args.t0,
        foe=args.foe,
        seed=args.seed,
        noise_sigma=args.noise,
    )
    seq = synth_mod.generate(cfg)
    synth_mod.write_sequence(seq, args.out)
    print(f"synth: wrote {cfg.frames} frames to {args.out}", file=sys.stderr)
    return 0


def _size_arg(text: str):
    try:
        w, h = (int(x) for x in text.lower().split("x"))
        return w, h
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None


def _foe_arg(text: str):
    try:
        fx, fy = (float(x) for x in text.split(","))
        return fx, fy
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected FX,FY, got {text!r}") from None


def _extents_arg(text: str):
    lo, sep, hi = text.partition("..")
    try:
        lo_i, hi_i = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if not sep or lo_i < 1 or hi_i < lo_i:
        raise argparse.ArgumentTypeError(f"bad extent range {text!r}")
    return range(lo_i, hi_i + 1)


def _cmd_bench(args) -> int:
    records = bench_mod.bench_sweep(
        signal_extent=args.signal_extent,
        kernel_extents=args.kernel_extents,
        ndim=args.ndim,
        reps=args.reps,
        seed=args.seed,
    )
    if args.csv:
        bench_mod.write_bench_csv(records, args.csv)
    else:
        print(bench_mod.BENCH_HEADER)
        for r in records:
            print(
                f"{r.method},{r.ndim},{r.signal_extent},{r.kernel_extent},"
                f"{r.reps},{r.median_ns},{r.mean_ns},{r.stddev_ns}"
            )
    return 0


def _cmd_calibrate(args) -> int:
    report = bench_mod.calibrate(
        ndim=args.ndim,
        signal_extent=args.signal_extent,
        reps=args.reps,
        seed=args.seed,
        config_dir=".",
    )
    if report.crossover_extent is None:
        print("calibrate: no crossover in sweep range, keeping current threshold")
    else:
        print(
            f"calibrate: FFT overtakes direct at kernel extent {report.crossover_extent}, "
            f"wrote auto_threshold={report.recommended_threshold} to {CONFIG_NAME}"
        )
    return 0


def _cmd_eval(args) -> int:
    report = synth_mod.score_mse(args.pred, args.truth)
    print(f"mse={report.mse:.6g} compared={report.compared} excluded={report.excluded}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="convtact",
        description="n-D convolution engine with a time-to-contact estimator on top",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("conv", help="convolve two tensors")
    p.add_argument("--input", required=True)
    p.add_argument("--kernel", required=True)
    p.add_argument("--method", choices=["auto", "direct", "fft"], default="auto")
    p.add_argument("--shape", choices=["full", "same", "valid"], default="full")
    p.add_argument("--boundary", choices=["zero", "replicate"], default="zero")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_conv)

    p = sub.add_parser("gradient", help="image gradient with a named kernel pair")
    p.add_argument("--input", required=True)
    p.add_argument("--kernel", choices=sorted(KERNELS), required=True)
    p.add_argument("--out-prefix", required=True)
    p.add_argument(
        "--format",
        choices=["ndt", "pgm"],
        default="ndt",
        help="pgm rescales each field to full range for viewing",
    )
    p.set_defaults(func=_cmd_gradient)

    p = sub.add_parser("ttc", help="time to contact over a frame sequence")
    p.add_argument("--frames", required=True, help="directory of frame_*.pgm or a 3-D .ndt")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--level", type=int, default=0, help="fixed pyramid level")
    mode.add_argument("--multiscale", action="store_true", help="greedy level selection")
    p.add_argument("--max-level", type=int, default=5)
    p.add_argument("--csv", help="trace output path (default stdout)")
    p.set_defaults(func=_cmd_ttc)

    p = sub.add_parser("synth", help="generate a synthetic approach sequence")
    p.add_argument("--size", type=_size_arg, default=(256, 256), metavar="WxH")
    p.add_argument("--frames", type=int, default=60)
    p.add_argument("--t0", type=float, default=100.0)
    p.add_argument("--foe", type=_foe_arg, default=(0.4, 0.55), metavar="FX,FY")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("bench", help="time direct vs FFT backends")
    p.add_argument("--ndim", type=int, default=2)
    p.add_argument("--signal-extent", type=int, default=512)
    p.add_argument(
        "--kernel-extents", type=_extents_arg, default=range(2, 17), metavar="A..B",
        help="inclusive range A..B",
    )
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="output path (default stdout)")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("calibrate", help="measure the direct/FFT crossover, update config")
    p.add_argument("--ndim", type=int, default=2)
    p.add_argument("--signal-extent", type=int, default=1000)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("eval", help="score a ttc trace against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.set_defaults(func=_cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 1
    try:
        return args.func(args)
    except (FormatError, OSError, ValueError, KeyError) as e:
        print(f"convtact: error: {e}", file=sys.stderr)
        return 2

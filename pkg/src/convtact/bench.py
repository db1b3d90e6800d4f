"""Direct-vs-FFT timing and threshold calibration.

Timings are median-of-reps wall clock on SAME-shaped output (the shape the
gradient and pyramid paths actually use), with one untimed warmup so numba
compilation and FFT plan setup never land in a measurement. Inputs are drawn
once per sweep from a seeded generator.

calibrate sweeps a geometric ladder of kernel extents, finds the bracket
where the faster backend flips, then bisects inside it down to adjacent
integer extents e, e+1 with direct winning at e and FFT at e+1. That pins
the crossover with integer-exact witnesses at a fraction of the cost of
timing every extent, which matters because a full sweep at useful signal
sizes runs long on one core.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import CONFIG_NAME, write_config
from .conv import ConvShape, conv_direct, conv_fft

BENCH_HEADER = "method,ndim,signal_extent,kernel_extent,reps,median_ns,mean_ns,stddev_ns"

DEFAULT_LADDER = (2, 3, 4, 5, 6, 8, 10, 12, 14, 16, 20, 24, 28, 32, 40, 48, 56, 64)


@dataclass(frozen=True)
class BenchRecord:
    method: str
    ndim: int
    signal_extent: int
    kernel_extent: int
    reps: int
    median_ns: int
    mean_ns: int
    stddev_ns: int


@dataclass(frozen=True)
class CrossoverReport:
    records: list[BenchRecord]
    crossover_extent: int | None
    recommended_threshold: int | None


def _time(fn, reps: int) -> tuple[int, int, int]:
    fn()  # warmup: JIT, FFT twiddle tables, page faults
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        fn()
        samples.append(time.perf_counter_ns() - t0)
    med = int(statistics.median(samples))
    mean = int(statistics.fmean(samples))
    stddev = int(statistics.pstdev(samples)) if reps > 1 else 0
    return med, mean, stddev


def _measure(signal, kernel, reps: int) -> tuple[BenchRecord, BenchRecord]:
    ndim = signal.ndim
    se, ke = signal.shape[0], kernel.shape[0]
    rec = []
    for method, fn in (
        ("direct", lambda: conv_direct(signal, kernel, ConvShape.SAME)),
        ("fft", lambda: conv_fft(signal, kernel, ConvShape.SAME)),
    ):
        med, mean, std = _time(fn, reps)
        rec.append(BenchRecord(method, ndim, se, ke, reps, med, mean, std))
    return rec[0], rec[1]


def _inputs(ndim: int, signal_extent: int, kernel_extent: int, rng):
    if not 1 <= ndim <= 3:
        raise ValueError(f"bench covers ndim 1..3, got {ndim}")
    if kernel_extent > signal_extent:
        raise ValueError(f"kernel extent {kernel_extent} exceeds signal extent {signal_extent}")
    signal = rng.standard_normal((signal_extent,) * ndim)
    kernel = rng.standard_normal((kernel_extent,) * ndim)
    return signal, kernel


def bench_sweep(
    signal_extent: int,
    kernel_extents,
    ndim: int = 2,
    reps: int = 5,
    seed: int = 0,
) -> list[BenchRecord]:
    if reps < 1:
        raise ValueError("reps must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    records = []
    for ke in kernel_extents:
        signal, kernel = _inputs(ndim, signal_extent, int(ke), rng)
        records.extend(_measure(signal, kernel, reps))
    return records


def write_bench_csv(records, path) -> None:
    lines = [BENCH_HEADER]
    for r in records:
        lines.append(
            f"{r.method},{r.ndim},{r.signal_extent},{r.kernel_extent},"
            f"{r.reps},{r.median_ns},{r.mean_ns},{r.stddev_ns}"
        )
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def read_bench_csv(path) -> list[BenchRecord]:
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != BENCH_HEADER.split(","):
            raise ValueError(f"{path}: unexpected bench CSV columns {reader.fieldnames}")
        return [
            BenchRecord(
                method=rec["method"],
                ndim=int(rec["ndim"]),
                signal_extent=int(rec["signal_extent"]),
                kernel_extent=int(rec["kernel_extent"]),
                reps=int(rec["reps"]),
                median_ns=int(rec["median_ns"]),
                mean_ns=int(rec["mean_ns"]),
                stddev_ns=int(rec["stddev_ns"]),
            )
            for rec in reader
        ]


def calibrate(
    ndim: int = 2,
    signal_extent: int = 1000,
    extents=None,
    reps: int = 5,
    seed: int = 0,
    config_dir=None,
) -> CrossoverReport:
    """Find the smallest kernel extent where FFT beats direct; update config.

    `extents` is the coarse ladder to probe (default covers 2..64). When the
    ladder brackets a flip, integer bisection narrows it to adjacent-extent
    witnesses and auto_threshold is set to crossover**ndim in convtact.cfg
    under config_dir (skip the write with config_dir=None). Without a flip in
    range the default threshold stands and crossover_extent is None.
    """
    if extents is None:
        extents = DEFAULT_LADDER
    extents = sorted({int(e) for e in extents})
    if len(extents) < 2:
        raise ValueError("need at least two extents to bracket a crossover")
    rng = np.random.Generator(np.random.PCG64(seed))
    records: list[BenchRecord] = []
    timed: dict[int, tuple[int, int]] = {}

    def probe(ke: int) -> tuple[int, int]:
        if ke not in timed:
            signal, kernel = _inputs(ndim, signal_extent, ke, rng)
            d, f = _measure(signal, kernel, reps)
            records.extend((d, f))
            timed[ke] = (d.median_ns, f.median_ns)
        return timed[ke]

    def fft_wins(ke: int) -> bool:
        d, f = probe(ke)
        return f < d

    lo = hi = None
    for a, b in zip(extents, extents[1:]):
        if not fft_wins(a) and fft_wins(b):
            lo, hi = a, b
            break
    if lo is None:
        return CrossoverReport(records=records, crossover_extent=None, recommended_threshold=None)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fft_wins(mid):
            hi = mid
        else:
            lo = mid
    crossover = hi
    threshold = crossover**ndim
    if config_dir is not None:
        write_config(Path(config_dir) / CONFIG_NAME, {"auto_threshold": threshold})
    return CrossoverReport(
        records=records, crossover_extent=crossover, recommended_threshold=threshold
    )

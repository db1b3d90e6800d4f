"""End-to-end acceptance gate.

One test per criterion, numbered in the test name; each also leaves a single
PASS/FAIL summary line that conftest prints after the run. Tolerances and
budgets are stated inline next to each check.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from oracles import conv_full_scatter, xcorr_full_scatter

from convtact import (
    ConvMethod,
    ConvShape,
    conv_auto,
    conv_direct,
    conv_fft,
    gradient,
    xcorr_direct,
)
from convtact.bench import _measure, bench_sweep, calibrate
from convtact.kernels import KERNELS
from convtact.synth import SynthConfig, generate, write_sequence
from convtact.ttc import FramePair, estimate_fixed, estimate_multiscale, run_sequence, write_trace
from convtact.synth import make_texture, zoom_frame

F = ConvShape.FULL
SEEDS = (1, 2, 3)
T0 = 100.0
SIZE = 256
_GEN_SECONDS = {}


def record(num, name, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {num:02d} [{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"criterion {num} {name}: {detail}"


@pytest.fixture(scope="module")
def clean_suite():
    t0 = time.perf_counter()
    suite = {s: generate(SynthConfig(seed=s)) for s in SEEDS}
    _GEN_SECONDS["clean"] = time.perf_counter() - t0
    return suite


@pytest.fixture(scope="module")
def noisy_suite():
    return {s: generate(SynthConfig(seed=s, noise_sigma=0.05)) for s in SEEDS}


@pytest.fixture(scope="module")
def clean_level0(clean_suite):
    t0 = time.perf_counter()
    traces = {s: run_sequence(seq.frames, level=0) for s, seq in clean_suite.items()}
    _GEN_SECONDS["level0"] = time.perf_counter() - t0
    return traces


def test_criterion_01_oracle_equivalence():
    # 200 randomized cases per ndim in {1,2,3,4}, extents <= 8, values in
    # [-1,1]: direct conv (kernel flipped) and xcorr (unflipped) match the
    # definitional scatter sums within 1e-12 absolute; under 10 s.
    t_start = time.perf_counter()
    rng = np.random.default_rng(123)
    max_extent = {1: 8, 2: 8, 3: 5, 4: 4}
    worst = 0.0
    for ndim in (1, 2, 3, 4):
        hi = max_extent[ndim]
        for _ in range(200):
            s = rng.uniform(-1, 1, tuple(rng.integers(1, hi + 1, ndim)))
            k = rng.uniform(-1, 1, tuple(rng.integers(1, hi + 1, ndim)))
            worst = max(
                worst,
                np.abs(conv_direct(s, k, F) - conv_full_scatter(s, k)).max(),
                np.abs(xcorr_direct(s, k, F) - xcorr_full_scatter(s, k)).max(),
            )
    elapsed = time.perf_counter() - t_start
    ok = worst <= 1e-12 and elapsed < 10.0
    record(1, "oracle equivalence", ok,
           f"800 cases, worst abs dev {worst:.2e} (tol 1e-12), {elapsed:.1f}s (<10s)")


def test_criterion_02_backend_agreement():
    t_start = time.perf_counter()
    rng = np.random.default_rng(321)
    worst = 0.0
    for _ in range(50):
        s = rng.standard_normal((int(rng.integers(16, 257)), int(rng.integers(16, 257))))
        k = rng.standard_normal((int(rng.integers(2, 33)), int(rng.integers(2, 33))))
        d = conv_direct(s, k, F)
        f = conv_fft(s, k, F)
        worst = max(worst, np.abs(d - f).max() / np.abs(d).max())
    elapsed = time.perf_counter() - t_start
    ok = worst <= 1e-8 and elapsed < 60.0
    record(2, "backend agreement", ok,
           f"50 cases, worst rel inf-norm {worst:.2e} (tol 1e-8), {elapsed:.1f}s (<60s)")


def test_criterion_03_small_kernel_speed():
    rng = np.random.default_rng(7)
    signal = rng.random((1000, 1000))
    kernel = rng.random((3, 3))
    direct, fft = _measure(signal, kernel, reps=9)
    ratio = fft.median_ns / direct.median_ns
    ok = direct.median_ns * 5 <= fft.median_ns
    record(3, "small-kernel speed", ok,
           f"1000x1000 3x3: direct {direct.median_ns/1e6:.2f}ms vs fft "
           f"{fft.median_ns/1e6:.2f}ms, {ratio:.1f}x (need >= 5x)")


def test_criterion_04_crossover_existence():
    t_start = time.perf_counter()
    ladder = (2, 3, 4, 5, 6, 8, 10, 12, 14, 16, 20, 24, 28, 32, 40, 48, 56, 64, 96, 128)
    rep = calibrate(ndim=2, signal_extent=1000, extents=ladder, reps=5, seed=0, config_dir=None)
    medians = {(r.method, r.kernel_extent): r.median_ns for r in rep.records}
    for r in bench_sweep(1000, [128], ndim=2, reps=5, seed=0):
        medians[(r.method, r.kernel_extent)] = r.median_ns
    elapsed = time.perf_counter() - t_start
    in_range = rep.crossover_extent is not None and 8 <= rep.crossover_extent <= 200
    direct_wins_3 = medians[("direct", 3)] < medians[("fft", 3)]
    fft_wins_128 = medians[("fft", 128)] < medians[("direct", 128)]
    ok = in_range and direct_wins_3 and fft_wins_128 and elapsed < 600.0
    record(4, "crossover existence", ok,
           f"crossover extent {rep.crossover_extent} (need within [8,200]), "
           f"direct faster at 3: {direct_wins_3}, fft faster at 128: {fft_wins_128}, "
           f"{elapsed:.0f}s (<600s)")


def test_criterion_05_dispatch_correctness():
    signal = np.ones(2000)
    wrong = []
    for n in range(890, 910):  # 10 kernels below the 900 threshold, 10 at or above
        _, chosen = conv_auto(signal, np.ones(n), ConvShape.SAME,
                              method=ConvMethod.AUTO, threshold=900)
        expect = ConvMethod.DIRECT if n < 900 else ConvMethod.FFT
        if chosen != expect:
            wrong.append(n)
    ok = not wrong
    record(5, "dispatch correctness", ok,
           f"20 configurations straddling threshold 900, mismatches: {wrong or 'none'}")


def test_criterion_06_ttc_recovery(clean_suite, clean_level0):
    t_start = time.perf_counter()
    worst, where = 0.0, None
    for s in SEEDS:
        for t, est in enumerate(clean_level0[s]):
            true = T0 - t
            if true < 20:
                continue
            rel = abs(est.ttc - true) / true
            if rel > worst:
                worst, where = rel, (s, t)
    elapsed = _GEN_SECONDS["clean"] + _GEN_SECONDS["level0"] + time.perf_counter() - t_start
    ok = worst <= 0.10 and elapsed < 60.0
    record(6, "ttc recovery", ok,
           f"level 0, 3 seeds: worst rel err {worst*100:.2f}% at seed {where[0]} "
           f"frame {where[1]} (tol 10%), {elapsed:.1f}s (<60s)")


def test_criterion_07_foe_recovery(clean_suite, clean_level0):
    budget = 0.05 * SIZE  # 12.8 px
    worst, where = 0.0, None
    for s in SEEDS:
        fx, fy = clean_suite[s].config.foe_px
        for t, est in enumerate(clean_level0[s]):
            if T0 - t < 20:
                continue
            err = np.hypot(est.x0 + (SIZE - 1) / 2 - fx, est.y0 + (SIZE - 1) / 2 - fy)
            if err > worst:
                worst, where = err, (s, t)
    ok = worst <= budget
    record(7, "foe recovery", ok,
           f"worst FOE error {worst:.2f}px at seed {where[0]} frame {where[1]} "
           f"(budget {budget:.1f}px)")


def test_criterion_08_multiscale_benefit(noisy_suite):
    fixed_levels = (0, 2, 4, 5)
    sq = {lv: [] for lv in fixed_levels}
    sq_ms = []
    for s in SEEDS:
        frames = noisy_suite[s].frames
        for lv in fixed_levels:
            for t, est in enumerate(run_sequence(frames, level=lv)):
                if np.isfinite(est.ttc):
                    sq[lv].append((est.ttc - (T0 - t)) ** 2)
        for t, est in enumerate(run_sequence(frames, max_level=5)):
            if np.isfinite(est.ttc):
                sq_ms.append((est.ttc - (T0 - t)) ** 2)
    mse = {lv: float(np.mean(v)) for lv, v in sq.items()}
    mse_ms = float(np.mean(sq_ms))
    best_fixed = min(mse.values())
    ok = mse_ms <= 1.1 * best_fixed and mse_ms < mse[0]
    record(8, "multiscale benefit", ok,
           f"noisy sigma 0.05: MSE multiscale {mse_ms:.2f} vs fixed "
           + ", ".join(f"L{lv} {mse[lv]:.2f}" for lv in fixed_levels)
           + f" (need <= 1.1x best fixed {best_fixed:.2f} and < L0)")


def test_criterion_09_scale_invariance(clean_suite, clean_level0):
    worst, where = 0.0, None
    for s in SEEDS:
        l1 = run_sequence(clean_suite[s].frames, level=1)
        for t, (e0, e1) in enumerate(zip(clean_level0[s], l1)):
            if T0 - t < 20:
                continue
            rel = abs(e1.ttc - e0.ttc) / e0.ttc
            if rel > worst:
                worst, where = rel, (s, t)
    ok = worst <= 0.10
    record(9, "ttc scale invariance", ok,
           f"level 1 vs level 0, framewise worst {worst*100:.2f}% at seed {where[0]} "
           f"frame {where[1]} (tol 10%)")


def test_criterion_10_throughput():
    tex = make_texture(640, 480, seed=1)
    pair = FramePair(tex, zoom_frame(tex, (320.0, 240.0), 100.0 / 99.0))
    estimate_fixed(pair, 0)  # warm path
    times = []
    for _ in range(10):
        t0 = time.perf_counter()
        estimate_fixed(pair, 0)
        times.append(time.perf_counter() - t0)
    rate_l0 = 1.0 / float(np.median(times))
    estimate_multiscale(pair, max_level=5)
    times = []
    for _ in range(5):
        t0 = time.perf_counter()
        estimate_multiscale(pair, max_level=5)
        times.append(time.perf_counter() - t0)
    rate_ms = 1.0 / float(np.median(times))
    ok = rate_l0 >= 30.0 and rate_ms >= 10.0
    record(10, "throughput sanity (soft)", ok,
           f"640x480: level 0 {rate_l0:.0f} pairs/s (need 30), "
           f"multiscale {rate_ms:.0f} pairs/s (need 10)")


def test_criterion_11_gradient_identities():
    rng = np.random.default_rng(77)
    y, x = np.mgrid[0:20, 0:20].astype(np.float64)
    ramp = 3.0 * x + 4.0 * y
    ramp_scale = {"roberts": np.sqrt(2.0), "prewitt2": 1.0, "prewitt3": 6.0, "sobel": 8.0}
    checked, failures = 0, []
    for i in range(50):
        img = rng.random((20, 20))
        const = np.full((20, 20), float(rng.random()))
        for name in KERNELS:
            fc = gradient(const, name)
            if not np.allclose(fc.mag, 0.0, atol=1e-13):
                failures.append(f"{name} annihilation img {i}")
            fr = gradient(ramp, name)
            if not np.allclose(fr.mag[2:-2, 2:-2] / ramp_scale[name], 5.0, atol=1e-12):
                failures.append(f"{name} 3-4-5 magnitude")
            f = gradient(img, name)
            if not np.all((f.dir >= -np.pi) & (f.dir <= np.pi)):
                failures.append(f"{name} direction range img {i}")
            ft = gradient(img.T, name)
            if name == "roberts":
                swap_ok = np.allclose(ft.ex, f.ex.T, atol=1e-12) and np.allclose(
                    ft.ey, -f.ey.T, atol=1e-12
                )
            else:
                swap_ok = np.allclose(ft.ex, f.ey.T, atol=1e-12) and np.allclose(
                    ft.ey, f.ex.T, atol=1e-12
                )
            if not swap_ok:
                failures.append(f"{name} transpose swap img {i}")
            checked += 1
    record(11, "gradient identities", not failures,
           f"{checked} kernel/image checks (annihilation, 3-4-5 magnitude, direction "
           f"range, transpose swap), failures: {failures[:3] or 'none'}")


def test_criterion_12_determinism(clean_suite, tmp_path):
    cfg = SynthConfig(seed=1)
    again = generate(cfg)
    frames_ok = np.array_equal(clean_suite[1].frames, again.frames)
    truth_ok = np.array_equal(clean_suite[1].truth, again.truth)
    noisy_cfg = SynthConfig(seed=2, noise_sigma=0.05)
    noise_ok = np.array_equal(generate(noisy_cfg).frames, generate(noisy_cfg).frames)
    d1, d2 = tmp_path / "a", tmp_path / "b"
    write_sequence(again, d1)
    write_sequence(again, d2)
    files_ok = all(
        (d1 / n).read_bytes() == (d2 / n).read_bytes()
        for n in ("truth.csv", "frame_000000.pgm", "frame_000059.pgm")
    )
    ests = run_sequence(again.frames[:10], level=0)
    write_trace(ests, tmp_path / "t1.csv")
    write_trace(run_sequence(again.frames[:10], level=0), tmp_path / "t2.csv")
    trace_ok = (tmp_path / "t1.csv").read_bytes() == (tmp_path / "t2.csv").read_bytes()
    ok = frames_ok and truth_ok and noise_ok and files_ok and trace_ok
    record(12, "determinism", ok,
           f"frames bit-identical: {frames_ok}, truth: {truth_ok}, noisy rerun: {noise_ok}, "
           f"written files: {files_ok}, trace CSV: {trace_ok}")

"""Synthetic approach sequences with exact ground truth.

A textured plane approached at constant speed appears as a zoom: frame t
magnifies the seed texture by m(t) = t0 / (t0 - t) about a fixed expansion
point, so true time to contact at frame t is exactly t0 - t frames and the
true FOE never moves. Resampling is separable Catmull-Rom bicubic with edge
clamping; magnification 1 returns the texture bit-exactly.

Determinism: the texture stream is PCG64(seed); per-frame sensor noise draws
from the independent stream PCG64(SeedSequence([seed, 1])) so adding noise
never perturbs the underlying texture.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .conv import BoundaryPolicy, ConvShape, xcorr_direct
from .tensor import image_write_pgm

_B3 = np.outer(*(2 * [np.array([1.0, 2.0, 1.0]) / 4.0]))


@dataclass(frozen=True)
class SynthConfig:
    width: int = 256
    height: int = 256
    frames: int = 60
    t0: float = 100.0
    foe: tuple[float, float] = (0.4, 0.55)
    seed: int = 1
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.width < 16 or self.height < 16:
            raise ValueError(f"size {self.width}x{self.height} too small, need >= 16")
        if self.frames < 2:
            raise ValueError("need at least 2 frames")
        if not self.t0 > 0:
            raise ValueError("t0 must be positive")
        if self.frames >= self.t0:
            raise ValueError(
                f"frames ({self.frames}) must stay short of contact at t0 ({self.t0})"
            )
        fx, fy = self.foe
        if not (0.0 < fx < 1.0 and 0.0 < fy < 1.0):
            raise ValueError(f"foe fractions must lie inside (0, 1), got {self.foe}")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")

    @property
    def foe_px(self) -> tuple[float, float]:
        return self.foe[0] * self.width, self.foe[1] * self.height


@dataclass(frozen=True)
class SyntheticSequence:
    frames: np.ndarray
    truth: np.ndarray  # rows (frame, ttc, foe_x, foe_y), FOE in array pixels
    config: SynthConfig


def make_texture(width: int, height: int, seed: int) -> np.ndarray:
    """Band-limited random texture in [0, 1].

    Uniform white noise, two 3x3 binomial smoothing passes through the conv
    engine, then min-max rescale. Two passes leave enough high-frequency
    energy for the derivative stencils while killing pixel-to-pixel noise
    that bicubic resampling would alias.
    """
    if width < 16 or height < 16:
        raise ValueError(f"texture {width}x{height} too small, need >= 16")
    rng = np.random.Generator(np.random.PCG64(seed))
    img = rng.random((height, width))
    for _ in range(2):
        img = xcorr_direct(img, _B3, ConvShape.SAME, BoundaryPolicy.REPLICATE)
    lo, hi = img.min(), img.max()
    if hi <= lo:
        return np.zeros_like(img)
    return (img - lo) / (hi - lo)


def _axis_taps(size: int, center: float, magnification: float):
    p = np.arange(size, dtype=np.float64)
    src = center + (p - center) / magnification
    i0 = np.floor(src).astype(np.int64)
    f = src - i0
    idx = np.stack([i0 - 1, i0, i0 + 1, i0 + 2], axis=1)
    np.clip(idx, 0, size - 1, out=idx)
    f2 = f * f
    f3 = f2 * f
    # Catmull-Rom (a = -1/2) tap weights at offsets -1, 0, +1, +2
    w = np.stack(
        [
            -0.5 * f3 + f2 - 0.5 * f,
            1.5 * f3 - 2.5 * f2 + 1.0,
            -1.5 * f3 + 2.0 * f2 + 0.5 * f,
            0.5 * f3 - 0.5 * f2,
        ],
        axis=1,
    )
    return idx, w


def zoom_frame(texture: np.ndarray, foe_px: tuple[float, float], magnification: float):
    """Magnify about foe_px (x, y in array pixels); edge samples clamp."""
    if magnification < 1.0:
        raise ValueError(f"magnification must be >= 1, got {magnification}")
    texture = np.asarray(texture, dtype=np.float64)
    if magnification == 1.0:
        return texture.copy()
    h, w = texture.shape
    ix, wx = _axis_taps(w, foe_px[0], magnification)
    iy, wy = _axis_taps(h, foe_px[1], magnification)
    tmp = np.zeros_like(texture)
    for b in range(4):
        tmp += wx[None, :, b] * texture[:, ix[:, b]]
    out = np.zeros_like(texture)
    for a in range(4):
        out += wy[:, a][:, None] * tmp[iy[:, a], :]
    return out


def generate(cfg: SynthConfig) -> SyntheticSequence:
    texture = make_texture(cfg.width, cfg.height, cfg.seed)
    noise_rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([cfg.seed, 1])))
    foe_px = cfg.foe_px
    frames = np.empty((cfg.frames, cfg.height, cfg.width))
    truth = np.empty((cfg.frames, 4))
    for t in range(cfg.frames):
        frame = zoom_frame(texture, foe_px, cfg.t0 / (cfg.t0 - t))
        if cfg.noise_sigma > 0:
            frame = np.clip(
                frame + noise_rng.normal(0.0, cfg.noise_sigma, frame.shape), 0.0, 1.0
            )
        frames[t] = frame
        truth[t] = (t, cfg.t0 - t, foe_px[0], foe_px[1])
    return SyntheticSequence(frames=frames, truth=truth, config=cfg)


TRUTH_HEADER = "frame,ttc,foe_x,foe_y"


def write_sequence(seq: SyntheticSequence, outdir) -> None:
    """frame_%06d.pgm per frame plus truth.csv."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for t in range(seq.frames.shape[0]):
        image_write_pgm(seq.frames[t], outdir / f"frame_{t:06d}.pgm")
    lines = [TRUTH_HEADER]
    for row in seq.truth:
        lines.append(
            f"{int(row[0])},{format(row[1], '.17g')},"
            f"{format(row[2], '.17g')},{format(row[3], '.17g')}"
        )
    with open(outdir / "truth.csv", "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class ScoreReport:
    mse: float
    compared: int
    excluded: int


def _read_ttc_column(path):
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or "frame" not in reader.fieldnames or "ttc" not in reader.fieldnames:
            raise ValueError(f"{path}: need a CSV with frame and ttc columns")
        rows = {}
        for rec in reader:
            idx = int(rec["frame"])
            ttc = float(rec["ttc"])
            degenerate = rec.get("degenerate", "false").strip().lower() == "true"
            rows[idx] = (ttc, degenerate)
    return rows


def score_mse(pred_path, truth_path) -> ScoreReport:
    """MSE of predicted vs true ttc over shared frame indices.

    Degenerate and non-finite predictions are excluded from the mean but
    counted, so a sequence that mostly fails cannot score well by silence.
    """
    pred = _read_ttc_column(pred_path)
    truth = _read_ttc_column(truth_path)
    shared = sorted(set(pred) & set(truth))
    if not shared:
        raise ValueError("prediction and truth share no frame indices")
    errs = []
    excluded = 0
    for idx in shared:
        p, degenerate = pred[idx]
        t_true, _ = truth[idx]
        if degenerate or not math.isfinite(p):
            excluded += 1
            continue
        errs.append((p - t_true) ** 2)
    if not errs:
        raise ValueError("no comparable rows: every prediction was degenerate or non-finite")
    return ScoreReport(mse=float(np.mean(errs)), compared=len(errs), excluded=excluded)

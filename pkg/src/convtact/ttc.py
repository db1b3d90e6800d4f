"""Time-to-contact and focus-of-expansion from two frames, no feature tracking.

For pure camera translation toward a plane, the brightness constancy equation
collapses to a 3-parameter linear model at every pixel:

    a * Ex + b * Ey + c * G + Et ~ 0,   G = x * Ex + y * Ey

with image coordinates centered on the optical axis. Least squares over all
pixels gives (a, b, c); time to contact is 1/c in frame intervals and the
focus of expansion is (-a/c, -b/c). Everything is sums of products of
derivative images, so the whole estimator runs on the convolution engine.

Derivatives use the symmetric 2x2x2 cube stencils (quarter-weight differences
across x, y, t), applied as one 3-D valid-mode cross-correlation over the
stacked frame pair. The derivative grid therefore sits at half-pixel centers;
the centered coordinate ramps below account for that, and a recovered FOE is
reported in this centered frame (add (w-1)/2, (h-1)/2 for array coordinates).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .conv import BoundaryPolicy, ConvShape, xcorr_direct

# 2x2x2 derivative stencils over the stacked pair [t, y, x], x fastest.
_DX = 0.25 * np.array([[[-1.0, 1.0], [-1.0, 1.0]], [[-1.0, 1.0], [-1.0, 1.0]]])
_DY = 0.25 * np.array([[[-1.0, -1.0], [1.0, 1.0]], [[-1.0, -1.0], [1.0, 1.0]]])
_DT = 0.25 * np.array([[[-1.0, -1.0], [-1.0, -1.0]], [[1.0, 1.0], [1.0, 1.0]]])

# binomial taps for the pyramid smoothing stage
_B5 = np.outer(*(2 * [np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0]))

DEFAULT_C_MIN = 1e-9
_PIVOT_TOL = 1e-10
_IMPROVE_EPS = 1e-3


@dataclass(frozen=True)
class FramePair:
    first: np.ndarray
    second: np.ndarray

    def __post_init__(self):
        a, b = self.first, self.second
        if a.ndim != 2 or b.ndim != 2:
            raise ValueError("frames must be 2-D")
        if a.shape != b.shape:
            raise ValueError(f"frame extents differ: {a.shape} vs {b.shape}")


@dataclass(frozen=True)
class NormalSystem:
    """3x3 Gram matrix and right-hand side of the least-squares problem.

    et2 and count carry the constant term and pixel count of the objective so
    the residual at the solution can be reported without a second pass.
    """

    m: np.ndarray
    rhs: np.ndarray
    et2: float
    count: int


@dataclass(frozen=True)
class TtcEstimate:
    a: float
    b: float
    c: float
    x0: float
    y0: float
    ttc: float
    residual: float
    misfit: float
    level: int
    degenerate: bool


def derivatives_3d(pair: FramePair):
    """Ex, Ey, Et on the half-pixel grid, each (h-1, w-1)."""
    h, w = pair.first.shape
    if h < 2 or w < 2:
        raise ValueError(f"need extents >= 2 for derivatives, got {(h, w)}")
    stack = np.stack([pair.first, pair.second]).astype(np.float64)
    ex = xcorr_direct(stack, _DX, ConvShape.VALID)[0]
    ey = xcorr_direct(stack, _DY, ConvShape.VALID)[0]
    et = xcorr_direct(stack, _DT, ConvShape.VALID)[0]
    return ex, ey, et


def radial_gradient(ex: np.ndarray, ey: np.ndarray) -> np.ndarray:
    """G = x*Ex + y*Ey with coordinates centered on the derivative grid."""
    gh, gw = ex.shape
    xc = np.arange(gw, dtype=np.float64) - (gw - 1) / 2.0
    yc = np.arange(gh, dtype=np.float64) - (gh - 1) / 2.0
    return xc[None, :] * ex + yc[:, None] * ey


def build_normal_system(ex, ey, g, et, border: int = 1) -> NormalSystem:
    if not (ex.shape == ey.shape == g.shape == et.shape):
        raise ValueError("derivative fields must share extents")
    if border < 1:
        raise ValueError("border must cover the derivative-kernel radius (>= 1)")
    gh, gw = ex.shape
    if gh <= 2 * border or gw <= 2 * border:
        raise ValueError(f"no interior left: grid {(gh, gw)}, border {border}")
    win = np.s_[border:-border, border:-border]
    exw, eyw, gw_, etw = ex[win], ey[win], g[win], et[win]
    m = np.empty((3, 3))
    m[0, 0] = np.sum(exw * exw)
    m[0, 1] = m[1, 0] = np.sum(exw * eyw)
    m[0, 2] = m[2, 0] = np.sum(exw * gw_)
    m[1, 1] = np.sum(eyw * eyw)
    m[1, 2] = m[2, 1] = np.sum(eyw * gw_)
    m[2, 2] = np.sum(gw_ * gw_)
    rhs = -np.array([np.sum(exw * etw), np.sum(eyw * etw), np.sum(gw_ * etw)])
    return NormalSystem(m=m, rhs=rhs, et2=float(np.sum(etw * etw)), count=etw.size)


def _ldlt_solve(m: np.ndarray, rhs: np.ndarray):
    """Solve the symmetric 3x3 system; returns (v, degenerate).

    Plain LDL^T without pivoting: the Gram matrix is positive semidefinite,
    so a small or negative pivot means the data does not constrain all three
    parameters, which we surface as degeneracy rather than reordering around.
    """
    maxdiag = max(m[0, 0], m[1, 1], m[2, 2])
    if maxdiag <= 0.0:
        return None, True
    tol = _PIVOT_TOL * maxdiag
    d0 = m[0, 0]
    if d0 < tol:
        return None, True
    l10 = m[1, 0] / d0
    l20 = m[2, 0] / d0
    d1 = m[1, 1] - l10 * l10 * d0
    if d1 < tol:
        return None, True
    l21 = (m[2, 1] - l20 * l10 * d0) / d1
    d2 = m[2, 2] - l20 * l20 * d0 - l21 * l21 * d1
    if d2 < tol:
        return None, True
    # forward substitution L z = rhs, then D, then L^T
    z0 = rhs[0]
    z1 = rhs[1] - l10 * z0
    z2 = rhs[2] - l20 * z0 - l21 * z1
    y0, y1, y2 = z0 / d0, z1 / d1, z2 / d2
    v2 = y2
    v1 = y1 - l21 * v2
    v0 = y0 - l10 * v1 - l20 * v2
    return np.array([v0, v1, v2]), False


def solve_ttc(system: NormalSystem, c_min: float = DEFAULT_C_MIN) -> TtcEstimate:
    """Solve the normal equations; degeneracy is data, not failure.

    residual is the objective at the solution per summed pixel; misfit is the
    same numerator as a fraction of the temporal-derivative energy, which is
    what the multiscale search compares across levels (per-pixel residual
    shrinks under downsampling even when the fit gets worse).
    """
    v, degenerate = _ldlt_solve(system.m, system.rhs)
    if degenerate:
        residual = system.et2 / system.count if system.count else float("nan")
        return TtcEstimate(
            a=float("nan"), b=float("nan"), c=float("nan"),
            x0=float("nan"), y0=float("nan"), ttc=float("nan"),
            residual=residual, misfit=float("inf"), level=0, degenerate=True,
        )
    a, b, c = (float(x) for x in v)
    j = max(system.et2 - float(v @ system.rhs), 0.0)
    residual = j / system.count
    misfit = j / system.et2 if system.et2 > 0.0 else float("inf")
    if abs(c) < c_min:
        x0, y0, ttc = float("nan"), float("nan"), float("inf")
    else:
        x0, y0, ttc = -a / c, -b / c, 1.0 / c
    return TtcEstimate(
        a=a, b=b, c=c, x0=x0, y0=y0, ttc=ttc,
        residual=residual, misfit=misfit, level=0, degenerate=False,
    )


def downsample(img: np.ndarray) -> np.ndarray:
    """Halve both extents: 2x2 block averaging, then 5x5 binomial smoothing.

    Averaging first decimates onto the coarse grid; the binomial pass then
    restores a texture autocorrelation matched to the fine level, so the
    estimator sees statistically similar input at every pyramid level. A 3x3
    binomial leaves the coarse level visibly sharper than the fine one and
    biases coarse-level estimates measurably. Odd trailing rows/columns are
    dropped, which keeps block centers aligned with the image center at every
    level (coordinates scale by exactly 2 per level).
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    if h < 2 or w < 2:
        raise ValueError(f"cannot halve extents {(h, w)}")
    f = img[: (h // 2) * 2, : (w // 2) * 2]
    dec = 0.25 * (f[0::2, 0::2] + f[0::2, 1::2] + f[1::2, 0::2] + f[1::2, 1::2])
    return xcorr_direct(dec, _B5, ConvShape.SAME, BoundaryPolicy.REPLICATE)


def _level_extents(shape, level):
    h, w = shape
    for _ in range(level):
        h //= 2
        w //= 2
    return h, w


def _estimate_at(first, second, level, c_min) -> TtcEstimate:
    ex, ey, et = derivatives_3d(FramePair(first, second))
    g = radial_gradient(ex, ey)
    est = solve_ttc(build_normal_system(ex, ey, g, et, border=1), c_min=c_min)
    scale = float(2**level)
    return replace(
        est,
        level=level,
        x0=est.x0 * scale,
        y0=est.y0 * scale,
    )


def estimate_fixed(pair: FramePair, level: int = 0, c_min: float = DEFAULT_C_MIN) -> TtcEstimate:
    """Estimate at one pyramid level; FOE is mapped back to level-0 pixels.

    The block-average pyramid keeps the image center fixed, so centered FOE
    coordinates scale by exactly 2 per level. ttc is in frame intervals and
    does not rescale.
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    h, w = _level_extents(pair.first.shape, level)
    if h < 4 or w < 4:
        raise ValueError(
            f"extents {pair.first.shape} leave {(h, w)} after {level} halvings, need >= 4"
        )
    a, b = pair.first, pair.second
    for _ in range(level):
        a, b = downsample(a), downsample(b)
    return _estimate_at(a, b, level, c_min)


def estimate_multiscale(
    pair: FramePair, max_level: int = 5, c_min: float = DEFAULT_C_MIN
) -> TtcEstimate:
    """Greedy coarse-to-fine level selection.

    Walk up from level 0 while the misfit fraction keeps improving (relative
    decrease > 1e-3) and the next level still has extents >= 4; return the
    best level visited. A level with infinite misfit (degenerate, or no
    temporal-derivative energy) cannot improve on any finite predecessor, so
    it ends the walk. Selection uses misfit, not per-pixel residual: residual falls
    monotonically with level on essentially any input because downsampling
    averages away temporal-derivative energy, so it cannot rank levels.
    """
    if max_level < 0:
        raise ValueError("max_level must be >= 0")
    a, b = pair.first, pair.second
    best = None
    prev_misfit = None
    for level in range(max_level + 1):
        if min(a.shape + b.shape) < 4:
            break
        est = _estimate_at(a, b, level, c_min)
        if best is None or est.misfit < best.misfit:
            best = est
        if prev_misfit is not None and not est.misfit < prev_misfit * (1.0 - _IMPROVE_EPS):
            break
        prev_misfit = est.misfit
        if level < max_level and min(_level_extents(a.shape, 1)) >= 4:
            a, b = downsample(a), downsample(b)
        else:
            break
    return best


def run_sequence(
    frames: np.ndarray,
    level: int | None = 0,
    max_level: int | None = None,
    c_min: float = DEFAULT_C_MIN,
) -> list[TtcEstimate]:
    """Estimate over consecutive pairs of a [n, h, w] stack.

    Row i comes from frames (i, i+1). Pass max_level for the multiscale
    search instead of a fixed level.
    """
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 3:
        raise ValueError(f"frame stack must be 3-D, got ndim {frames.ndim}")
    if frames.shape[0] < 2:
        raise ValueError("need at least two frames")
    out = []
    for i in range(frames.shape[0] - 1):
        pair = FramePair(frames[i], frames[i + 1])
        if max_level is not None:
            out.append(estimate_multiscale(pair, max_level=max_level, c_min=c_min))
        else:
            out.append(estimate_fixed(pair, level=level or 0, c_min=c_min))
    return out


def _fmt(x: float) -> str:
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


TRACE_HEADER = "frame,ttc,foe_x,foe_y,residual,level,degenerate"


def trace_lines(estimates) -> list[str]:
    """Trace CSV lines, one row per frame pair; FOE in centered level-0 pixels."""
    lines = [TRACE_HEADER]
    for i, e in enumerate(estimates):
        flag = "true" if e.degenerate else "false"
        lines.append(
            f"{i},{_fmt(e.ttc)},{_fmt(e.x0)},{_fmt(e.y0)},{_fmt(e.residual)},{e.level},{flag}"
        )
    return lines


def write_trace(estimates, path) -> None:
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(trace_lines(estimates)) + "\n")

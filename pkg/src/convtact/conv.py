"""n-D convolution and cross-correlation with direct and FFT backends.

Semantics, for signal extent m and kernel extent n per axis:

  FULL   m + n - 1
  SAME   m, anchored so SAME(i) = FULL(i + floor((n - 1) / 2))
  VALID  m - n + 1, requires m >= n everywhere

True convolution reflects the kernel through its center; cross-correlation
does not, so conv(s, k) == xcorr(s, reflect(k)). Boundary policy matters only
where SAME reads outside the signal: ZERO extends with zeros, REPLICATE
clamps to the nearest edge sample. With the anchor above, a SAME window at
output index i spans ceil((n-1)/2) samples to the left and floor((n-1)/2) to
the right for cross-correlation; convolution lands on the same pad widths
because the reflected kernel is applied through the identical window.

The FFT backend multiplies in the frequency domain (true convolution), pads
each axis to the next 5-smooth length, and crops to the requested shape.
conv_auto picks a backend for AUTO by comparing the kernel element count
against a threshold calibrated on this machine (see bench.calibrate).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _loops

DEFAULT_AUTO_THRESHOLD = 900


class ConvShape(Enum):
    FULL = "full"
    SAME = "same"
    VALID = "valid"


class ConvMethod(Enum):
    DIRECT = "direct"
    FFT = "fft"
    AUTO = "auto"


class BoundaryPolicy(Enum):
    ZERO = "zero"
    REPLICATE = "replicate"


@dataclass(frozen=True)
class ConvPlan:
    """Resolved operation parameters, mostly a carrier for the CLI."""

    method: ConvMethod = ConvMethod.AUTO
    shape: ConvShape = ConvShape.FULL
    boundary: BoundaryPolicy = BoundaryPolicy.ZERO
    threshold: int = DEFAULT_AUTO_THRESHOLD


def reflect(k: np.ndarray) -> np.ndarray:
    """Reverse every axis (point reflection through the kernel center)."""
    return k[(slice(None, None, -1),) * k.ndim]


def next_fast_len(n: int) -> int:
    """Smallest 5-smooth integer >= n (FFT lengths with cheap radix factors)."""
    if n <= 6:
        return max(n, 1)
    best = 1 << (n - 1).bit_length()
    p5 = 1
    while p5 < best:
        p35 = p5
        while p35 < best:
            quotient = -(-n // p35)
            p2 = 1 << (quotient - 1).bit_length() if quotient > 1 else 1
            candidate = p2 * p35
            if candidate < best:
                best = candidate
            p35 *= 3
        p5 *= 5
    return best


def _check_pair(s: np.ndarray, k: np.ndarray) -> None:
    if s.ndim != k.ndim:
        raise ValueError(f"rank mismatch: signal ndim {s.ndim}, kernel ndim {k.ndim}")
    if s.ndim < 1:
        raise ValueError("zero-rank tensors not supported")


def _check_valid(s: np.ndarray, k: np.ndarray) -> None:
    for ax, (m, n) in enumerate(zip(s.shape, k.shape)):
        if m < n:
            raise ValueError(
                f"VALID needs signal >= kernel on every axis, axis {ax} has {m} < {n}"
            )


def _as_f64(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.float64)


def _xcorr_valid(s: np.ndarray, k: np.ndarray) -> np.ndarray:
    if s.ndim == 1:
        return _loops.xcorr_valid_1d(s, k)
    if s.ndim == 2:
        return _loops.xcorr_valid_2d(s, k)
    if s.ndim == 3:
        return _loops.xcorr_valid_3d(s, k)
    return _loops.xcorr_valid_nd(s, k)


def _same_pads(n: int) -> tuple[int, int]:
    # left = ceil((n-1)/2), right = floor((n-1)/2); see module docstring
    return (n - 1) - (n - 1) // 2, (n - 1) // 2


def _xcorr_zpad(s, k, lefts, out_shape):
    # zero boundary without a padded copy; only ranks 1..3 have compiled loops
    if s.ndim == 1:
        return _loops.xcorr_zpad_1d(s, k, lefts[0], out_shape[0])
    if s.ndim == 2:
        return _loops.xcorr_zpad_2d(s, k, *lefts, *out_shape)
    if s.ndim == 3:
        return _loops.xcorr_zpad_3d(s, k, *lefts, *out_shape)
    rights = [o - m - pl + n - 1 for o, m, pl, n in
              zip(out_shape, s.shape, lefts, k.shape)]
    return _xcorr_valid(np.pad(s, list(zip(lefts, rights))), k)


def _direct(s, k, shape, boundary, flip):
    s = _as_f64(s)
    k = _as_f64(k)
    _check_pair(s, k)
    if flip:
        k = np.ascontiguousarray(reflect(k))
    if shape == ConvShape.VALID:
        _check_valid(s, k)
        return _xcorr_valid(s, k)
    if shape == ConvShape.FULL:
        lefts = [n - 1 for n in k.shape]
        out_shape = [m + n - 1 for m, n in zip(s.shape, k.shape)]
        return _xcorr_zpad(s, k, lefts, out_shape)
    if boundary == BoundaryPolicy.REPLICATE:
        pad = [_same_pads(n) for n in k.shape]
        return _xcorr_valid(np.pad(s, pad, mode="edge"), k)
    lefts = [_same_pads(n)[0] for n in k.shape]
    return _xcorr_zpad(s, k, lefts, list(s.shape))


def xcorr_direct(signal, kernel, shape=ConvShape.FULL, boundary=BoundaryPolicy.ZERO):
    return _direct(signal, kernel, shape, boundary, flip=False)


def conv_direct(signal, kernel, shape=ConvShape.FULL, boundary=BoundaryPolicy.ZERO):
    return _direct(signal, kernel, shape, boundary, flip=True)


def conv_fft(signal, kernel, shape=ConvShape.FULL):
    """True convolution via real FFT; boundary is zero-extension by construction."""
    s = _as_f64(signal)
    k = _as_f64(kernel)
    _check_pair(s, k)
    if shape == ConvShape.VALID:
        _check_valid(s, k)
    full = tuple(m + n - 1 for m, n in zip(s.shape, k.shape))
    fshape = tuple(next_fast_len(x) for x in full)
    axes = tuple(range(s.ndim))
    spec = np.fft.rfftn(s, s=fshape, axes=axes) * np.fft.rfftn(k, s=fshape, axes=axes)
    out = np.fft.irfftn(spec, s=fshape, axes=axes)
    out = out[tuple(slice(0, x) for x in full)]
    if shape == ConvShape.FULL:
        return np.ascontiguousarray(out)
    if shape == ConvShape.SAME:
        crop = tuple(slice((n - 1) // 2, (n - 1) // 2 + m) for m, n in zip(s.shape, k.shape))
    else:
        crop = tuple(slice(n - 1, m) for m, n in zip(s.shape, k.shape))
    return np.ascontiguousarray(out[crop])


def conv_auto(
    signal,
    kernel,
    shape=ConvShape.FULL,
    boundary=BoundaryPolicy.ZERO,
    method=ConvMethod.AUTO,
    threshold: int | None = None,
):
    """Convolve, choosing the backend; returns (result, ConvMethod actually used).

    AUTO goes direct iff the kernel has fewer elements than `threshold`
    (default 900, overridable by calibration). A REPLICATE SAME request is
    lowered to edge-pad + VALID so both backends produce identical output.
    """
    s = _as_f64(signal)
    k = _as_f64(kernel)
    _check_pair(s, k)
    if threshold is None:
        threshold = DEFAULT_AUTO_THRESHOLD
    chosen = method
    if method == ConvMethod.AUTO:
        chosen = ConvMethod.DIRECT if k.size < threshold else ConvMethod.FFT
    if chosen == ConvMethod.DIRECT:
        return conv_direct(s, k, shape, boundary), ConvMethod.DIRECT
    if shape == ConvShape.SAME and boundary == BoundaryPolicy.REPLICATE:
        pad = [_same_pads(n) for n in k.shape]
        padded = np.pad(s, pad, mode="edge")
        return conv_fft(padded, k, ConvShape.VALID), ConvMethod.FFT
    return conv_fft(s, k, shape), ConvMethod.FFT

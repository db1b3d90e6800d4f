"""Named derivative kernel pairs and image gradient fields.

Each pair (kx, ky) estimates the brightness gradient by cross-correlation,
not convolution: the stencils are written exactly as they sit over the image,
so a positive kx response means brightness increases to the right. ky is the
transpose of kx except for roberts, whose two diagonal differences are each
other's 90-degree rotation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conv import BoundaryPolicy, ConvShape, xcorr_direct


@dataclass(frozen=True)
class NamedKernel:
    name: str
    kx: np.ndarray
    ky: np.ndarray


def _pair(name, kx):
    kx = np.asarray(kx, dtype=np.float64)
    return NamedKernel(name, kx, kx.T.copy())


KERNELS = {
    "roberts": NamedKernel(
        "roberts",
        np.array([[1.0, 0.0], [0.0, -1.0]]),
        np.array([[0.0, 1.0], [-1.0, 0.0]]),
    ),
    "prewitt2": _pair("prewitt2", [[-0.5, 0.5], [-0.5, 0.5]]),
    "prewitt3": _pair("prewitt3", [[-1.0, 0.0, 1.0]] * 3),
    "sobel": _pair("sobel", [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]]),
}


def kernel_lookup(name: str) -> NamedKernel:
    try:
        return KERNELS[name]
    except KeyError:
        raise KeyError(f"unknown kernel {name!r}, have {sorted(KERNELS)}") from None


@dataclass
class GradientField:
    """Per-pixel gradient components, same extents as the input image.

    dir is atan2(ey, ex) in [-pi, pi]; atan2(0, 0) = 0 where both vanish.
    """

    ex: np.ndarray
    ey: np.ndarray
    mag: np.ndarray
    dir: np.ndarray


def gradient(image, kernel) -> GradientField:
    """Apply a named kernel pair with SAME extents and replicated edges."""
    if isinstance(kernel, str):
        kernel = kernel_lookup(kernel)
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"image must be 2-D, got ndim {img.ndim}")
    ex = xcorr_direct(img, kernel.kx, ConvShape.SAME, BoundaryPolicy.REPLICATE)
    ey = xcorr_direct(img, kernel.ky, ConvShape.SAME, BoundaryPolicy.REPLICATE)
    return GradientField(ex=ex, ey=ey, mag=np.hypot(ex, ey), dir=np.arctan2(ey, ex))

"""Reference implementations used only by tests.

Two independent formulations of the definitional sums: a scatter form that
expands out[j] = sum_i k[i] * s[j - i] tap by tap, and a pointwise pure-loop
form for tiny cases. Neither shares code with the package.
"""

import numpy as np


def conv_full_scatter(s, k):
    """out[i + j] += k[j] * s[i], the Cauchy-product expansion."""
    out = np.zeros(tuple(a + b - 1 for a, b in zip(s.shape, k.shape)))
    for j in np.ndindex(*k.shape):
        win = tuple(slice(jj, jj + m) for jj, m in zip(j, s.shape))
        out[win] += k[j] * s
    return out


def xcorr_full_scatter(s, k):
    """Correlation lag grid: out[i + (n-1) - j] += k[j] * s[i]."""
    out = np.zeros(tuple(a + b - 1 for a, b in zip(s.shape, k.shape)))
    for j in np.ndindex(*k.shape):
        win = tuple(
            slice(n - 1 - jj, n - 1 - jj + m) for jj, n, m in zip(j, k.shape, s.shape)
        )
        out[win] += k[j] * s
    return out


def conv_full_pointwise(s, k):
    """Scalar triple loop straight from the definition; tiny inputs only."""
    out_shape = tuple(a + b - 1 for a, b in zip(s.shape, k.shape))
    out = np.zeros(out_shape)
    for j in np.ndindex(*out_shape):
        acc = 0.0
        for i in np.ndindex(*k.shape):
            src = tuple(jj - ii for jj, ii in zip(j, i))
            if all(0 <= x < m for x, m in zip(src, s.shape)):
                acc += k[i] * s[src]
        out[j] = acc
    return out


def crop_same(full, signal_shape, kernel_shape):
    return full[
        tuple(
            slice((n - 1) // 2, (n - 1) // 2 + m)
            for m, n in zip(signal_shape, kernel_shape)
        )
    ]


def crop_valid(full, signal_shape, kernel_shape):
    return full[tuple(slice(n - 1, m) for m, n in zip(signal_shape, kernel_shape))]

"""convtact: an n-D convolution engine and a time-to-contact estimator on top.

The convolution layer provides direct (compiled loop) and FFT backends with
identical semantics and a calibrated automatic switch between them. On top of
it sit named gradient kernels, a two-frame time-to-contact / focus-of-
expansion estimator with a multiscale search, and a synthetic zoom-sequence
generator for end-to-end evaluation.
"""

from .bench import BenchRecord, CrossoverReport, bench_sweep, calibrate
from .conv import (
    DEFAULT_AUTO_THRESHOLD,
    BoundaryPolicy,
    ConvMethod,
    ConvPlan,
    ConvShape,
    conv_auto,
    conv_direct,
    conv_fft,
    next_fast_len,
    reflect,
    xcorr_direct,
)
from .kernels import KERNELS, GradientField, NamedKernel, gradient, kernel_lookup
from .synth import ScoreReport, SynthConfig, SyntheticSequence, generate, make_texture, score_mse, write_sequence, zoom_frame
from .tensor import FormatError, image_read_pgm, image_write_pgm, tensor_create, tensor_read, tensor_write
from .ttc import (
    FramePair,
    NormalSystem,
    TtcEstimate,
    build_normal_system,
    derivatives_3d,
    downsample,
    estimate_fixed,
    estimate_multiscale,
    radial_gradient,
    run_sequence,
    solve_ttc,
    write_trace,
)

__version__ = "0.1.0"

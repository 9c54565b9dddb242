"""Backend selection for the hot convolution kernel.

The compiled extension is preferred; a scipy-based implementation of the
identical recursions is selected when the extension is unavailable or when
CARLEMAN_LAB_PURE_PYTHON=1 is set.  ``benchmarks/bench_convolve.py``
compares the two.
"""

from __future__ import annotations

import os

import numpy as np

from . import _conv_py
from .errors import InvalidArgumentError

if os.environ.get("CARLEMAN_LAB_PURE_PYTHON", "") == "1":
    _impl = _conv_py
    HAVE_EXTENSION = False
else:
    try:
        from . import _conv as _impl  # type: ignore[no-redef]

        HAVE_EXTENSION = True
    except ImportError:
        _impl = _conv_py
        HAVE_EXTENSION = False

__all__ = ["convolve_pieces", "backend", "HAVE_EXTENSION"]


def backend() -> str:
    return "cython" if _impl.__name__.endswith("_conv") else "scipy"


def convolve_pieces(wf, h, coeff, rate, side, power, lo, hi, *, force_backend=None):
    """Convolve weighted samples against per-slot piecewise-exponential kernels.

    Parameters
    ----------
    wf : (n_slots, n_in) float array
        Input samples already multiplied by their quadrature weights.
    h : float
        Grid step.
    coeff, rate : (n_slots, n_pieces) float arrays
        Piece amplitudes and positive decay rates; zero-amplitude entries
        are skipped, which is how ragged piece counts are padded.
    side, power : (n_slots, n_pieces) int arrays
        0/1 support side (eta <= 0 vs eta > 0) and eta-power (0 or 1).
    lo, hi : int
        Output window [lo, hi) of input-grid indices.

    Returns
    -------
    (n_slots, hi - lo) array of kernel-weighted sums.
    """
    wf = np.ascontiguousarray(wf, dtype=np.float64)
    if wf.ndim != 2:
        raise InvalidArgumentError("wf must be a 2-D (n_slots, n_in) array")
    coeff = np.ascontiguousarray(coeff, dtype=np.float64)
    rate = np.ascontiguousarray(rate, dtype=np.float64)
    side = np.ascontiguousarray(side, dtype=np.int32)
    power = np.ascontiguousarray(power, dtype=np.int32)
    shapes = {coeff.shape, rate.shape, side.shape, power.shape}
    if len(shapes) != 1 or coeff.shape[0] != wf.shape[0]:
        raise InvalidArgumentError("piece arrays must share shape (n_slots, n_pieces)")
    if not (0 <= lo <= hi <= wf.shape[1]):
        raise InvalidArgumentError("output window [lo, hi) must lie inside the input grid")
    if np.any(rate <= 0):
        raise InvalidArgumentError("piece rates must be positive (decay away from 0)")
    impl = _impl
    if force_backend == "scipy":
        impl = _conv_py
    elif force_backend == "cython":
        if not HAVE_EXTENSION:
            raise InvalidArgumentError("compiled extension not available")
        from . import _conv as impl  # type: ignore[no-redef]
    return impl.convolve_pieces(wf, float(h), coeff, rate, side, power, int(lo), int(hi))

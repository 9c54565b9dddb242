"""Fallback convolution core used when the compiled extension is absent.

Runs the same first-order recursions as the extension, expressed as IIR
filters so the per-sample loop stays inside scipy.signal.lfilter.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import lfilter


def convolve_pieces(wf, h, coeff, rate, side, power, lo, hi):
    n_slots, n_in = wf.shape
    out = np.zeros((n_slots, hi - lo))
    for s in range(n_slots):
        for p in range(coeff.shape[1]):
            c = coeff[s, p]
            if c == 0.0:
                continue
            q = float(np.exp(-rate[s, p] * h))
            x = wf[s]
            if side[s, p] == 0:
                # B_i = wf_i + q B_{i+1}: run forward on the reversed signal
                b_rev = lfilter([1.0], [1.0, -q], x[::-1])
                if power[s, p] == 0:
                    vals = b_rev[::-1]
                else:
                    # C_i = q (C_{i+1} - h B_{i+1})
                    c_rev = lfilter([0.0, -q * h], [1.0, -q], b_rev)
                    vals = c_rev[::-1]
            else:
                # A_i = q (A_{i-1} + wf_{i-1}), strict prefix
                vals = lfilter([0.0, q], [1.0, -q], x)
            out[s] += c * vals[lo:hi]
    return out

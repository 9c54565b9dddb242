"""The resolvent convolution kernel for a single transverse mode, its
closed form by residue calculus, a quadrature oracle, and the per-cluster
envelope bounds.

The kernel is defined as the inverse Fourier transform

    m(eta) = (1/2pi) int e^{i eta xi} / ((i xi - tau - lam)(i xi - tau + lam)) dxi.

Writing the denominator as -(xi + i(tau+lam))(xi + i(tau-lam)), the poles
sit at xi = -i(tau -+ lam) and contour closing gives, for tau > 0:

    tau > lam > 0:  m(eta) = (e^{(tau-lam) eta} - e^{(tau+lam) eta}) / (2 lam)  on eta <= 0,
                    m(eta) = 0                                                 on eta > 0;
    lam > tau:      m(eta) = -e^{(tau+lam) eta} / (2 lam)                      on eta <= 0,
                    m(eta) = -e^{-(lam-tau) eta} / (2 lam)                     on eta > 0;
    lam = 0:        m(eta) = |eta| e^{tau eta}                                 on eta <= 0
                    (double pole), zero on eta > 0.

In every case m is continuous, integrable, integrates to 1/(tau^2-lam^2),
and its derivative jumps by exactly +1 across eta = 0 (the 1/(i xi)^2 tail
of the symbol); that jump drives the trapezoid corner correction used by
the solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import sici

from .errors import InvalidArgumentError, QuadratureFailureError, SingularParameterError

__all__ = [
    "LEFT",
    "RIGHT",
    "KERNEL_DERIVATIVE_JUMP",
    "ExpPiece",
    "MultiplierKernel",
    "multiplier_closed",
    "multiplier_quadrature",
    "multiplier_envelope",
]

LEFT = 0  # supported on eta <= 0
RIGHT = 1  # supported on eta > 0 (strict, so the two sides partition R)

# m'(0+) - m'(0-) for every (lam, tau); see module docstring.
KERNEL_DERIVATIVE_JUMP = 1.0


class ExpPiece(NamedTuple):
    """One piece coeff * eta^power * exp(rate * sign * eta) of the kernel.

    ``rate`` is stored positive; the sign is implied by the side (growth
    toward 0 from the left, decay away from 0 on the right), so every
    piece decays away from the origin and is integrable.
    """

    coeff: float
    rate: float
    side: int
    power: int


@dataclass(frozen=True)
class MultiplierKernel:
    """Piecewise-exponential closed form of the mode kernel."""

    lam: float
    tau: float
    pieces: tuple[ExpPiece, ...]

    @classmethod
    def closed_form(cls, lam: float, tau: float) -> "MultiplierKernel":
        lam = float(lam)
        tau = float(tau)
        if lam < 0:
            raise InvalidArgumentError("lam must be >= 0")
        if not tau > 0:
            raise InvalidArgumentError("closed form assumes tau > 0")
        if tau == lam:
            raise SingularParameterError(
                f"tau={tau} coincides with an eigenvalue square root; the "
                "admissible set excludes this point"
            )
        if lam == 0.0:
            pieces = (ExpPiece(-1.0, tau, LEFT, 1),)
        elif tau > lam:
            pieces = (
                ExpPiece(1.0 / (2 * lam), tau - lam, LEFT, 0),
                ExpPiece(-1.0 / (2 * lam), tau + lam, LEFT, 0),
            )
        else:
            pieces = (
                ExpPiece(-1.0 / (2 * lam), tau + lam, LEFT, 0),
                ExpPiece(-1.0 / (2 * lam), lam - tau, RIGHT, 0),
            )
        return cls(lam, tau, pieces)

    def __call__(self, eta):
        eta_arr = np.asarray(eta, dtype=float)
        out = np.zeros_like(eta_arr)
        left = eta_arr <= 0
        right = ~left
        for coeff, rate, side, power in self.pieces:
            if side == LEFT:
                vals = np.exp(rate * eta_arr[left])
                if power:
                    vals = vals * eta_arr[left]
                out[left] += coeff * vals
            else:
                vals = np.exp(-rate * eta_arr[right])
                if power:
                    vals = vals * eta_arr[right]
                out[right] += coeff * vals
        return out if np.ndim(eta) else float(out)


def multiplier_closed(lam: float, tau: float, eta) -> float | np.ndarray:
    """Evaluate the residue-calculus closed form of the mode kernel."""
    return MultiplierKernel.closed_form(lam, tau)(eta)


def multiplier_quadrature(
    lam: float,
    tau: float,
    eta: float,
    cutoff: float = 1.0e4,
    step: float = 1.0e-3,
) -> float:
    """Oracle value of the defining oscillatory integral.

    Symmetric trapezoid over [-cutoff, cutoff] plus the analytic tail of
    the -1/xi^2 asymptote of the symbol (a sine-integral expression); the
    correction removes the 1/(pi*cutoff) truncation error that would
    otherwise dominate, leaving O(step^2) + O(1/cutoff^2).  An oracle for
    validating the closed form, not a production path.
    """
    if not (cutoff > 0 and step > 0):
        raise InvalidArgumentError("cutoff and step must be positive")
    if not tau > 0:
        raise InvalidArgumentError("the oracle assumes tau > 0")
    if tau == lam:
        raise SingularParameterError("tau coincides with lam")
    eta = float(eta)
    xi = np.arange(-cutoff, cutoff + step / 2, step)
    denom = (1j * xi - tau - lam) * (1j * xi - tau + lam)
    integrand = np.exp(1j * eta * xi) / denom
    value = float(np.trapezoid(integrand, dx=step).real) / (2.0 * np.pi)
    # tail of int_{|xi|>X} e^{i eta xi} (-1/xi^2) dxi / (2 pi)
    if eta == 0.0:
        value += -1.0 / (np.pi * cutoff)
    else:
        a = abs(eta) * cutoff
        si, _ = sici(a)
        value += -(abs(eta) / np.pi) * (np.cos(a) / a - (np.pi / 2.0 - si))
    if not np.isfinite(value):
        raise QuadratureFailureError(
            f"non-finite quadrature value for lam={lam}, tau={tau}, eta={eta}"
        )
    return value


def multiplier_envelope(
    k: int,
    lam: float | None,
    tau: float,
    sigma: float | None,
    eta,
) -> float | np.ndarray:
    """Envelope of max |m| over the modes of cluster k, per decay regime.

    Five regimes partition k >= 0 (tau >= 4 assumed; the admissible set
    guarantees tau > 5):

        k = 0                          e^{-(tau/2)|eta|}
        k = 1                          e^{-2|eta|}
        2 <= k <= floor(tau)-2         e^{-(tau-1-k)|eta|} / k
        floor(tau)-1 <= k <= floor(tau)+1   e^{-sigma|eta|} / k
        k >= floor(tau)+2              e^{-(k-tau)|eta|} / k

    The k = 1 window admits the sharper rate tau-2; the final envelope
    e^{-2|eta|} is kept as the bound actually consumed downstream.
    """
    if int(k) != k or k < 0:
        raise InvalidArgumentError("cluster index must be an integer >= 0")
    if not tau >= 4:
        raise InvalidArgumentError("envelope regimes assume tau >= 4")
    k = int(k)
    if lam is not None and not (k <= lam < k + 1):
        raise InvalidArgumentError(f"lam={lam} is not in cluster window [{k}, {k + 1})")
    a = np.abs(np.asarray(eta, dtype=float))
    floor_tau = int(np.floor(tau))
    if k == 0:
        out = np.exp(-(tau / 2.0) * a)
    elif k == 1:
        out = np.exp(-2.0 * a)
    elif k <= floor_tau - 2:
        out = np.exp(-(tau - 1.0 - k) * a) / k
    elif k <= floor_tau + 1:
        if sigma is None or not sigma > 0:
            raise InvalidArgumentError("near-resonant clusters need sigma > 0")
        out = np.exp(-sigma * a) / k
    else:
        out = np.exp(-(k - tau) * a) / k
    return out if np.ndim(eta) else float(out)

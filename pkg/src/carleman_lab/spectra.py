"""Model spectra of the nonnegative Laplace-Beltrami operator on closed
manifolds, the gap constant kappa, and admissibility of the Carleman
parameter tau.

Eigenvalues are handled through their square roots lambda_j, listed as
distinct values with multiplicities.  Only closed-form model spectra
(round spheres, the circle) and a plain-text import are provided.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError, SpectrumParseError

__all__ = [
    "Spectrum",
    "CarlemanParams",
    "sphere_spectrum",
    "circle_spectrum",
    "load_spectrum",
    "dump_spectrum",
    "spectral_gap",
    "tau_min",
    "is_admissible",
    "harmonic_dimension",
]


@dataclass(frozen=True)
class Spectrum:
    """Distinct eigenvalue square roots of -Laplacian on M', with multiplicities.

    ``distinct_values`` must be strictly increasing and nonnegative; for a
    connected closed manifold the first entry is 0 (not enforced for
    imported spectra, on which no structural claim is made).
    """

    distinct_values: tuple[float, ...]
    multiplicities: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        values = tuple(float(v) for v in self.distinct_values)
        mults = tuple(int(m) for m in self.multiplicities)
        object.__setattr__(self, "distinct_values", values)
        object.__setattr__(self, "multiplicities", mults)
        if len(values) == 0:
            raise InvalidArgumentError("spectrum must contain at least one value")
        if len(values) != len(mults):
            raise InvalidArgumentError("values and multiplicities must have equal length")
        if values[0] < 0:
            raise InvalidArgumentError("eigenvalue square roots must be nonnegative")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise InvalidArgumentError("distinct_values must be strictly increasing")
        if any(m < 1 for m in mults):
            raise InvalidArgumentError("every multiplicity must be >= 1")

    def __len__(self) -> int:
        return len(self.distinct_values)

    def values(self) -> np.ndarray:
        return np.asarray(self.distinct_values, dtype=float)


@dataclass(frozen=True)
class CarlemanParams:
    """Dimension, Carleman parameter, spectral margin and derived exponents.

    p = 2n/(n+2) and p' = 2n/(n-2) are conjugate; alpha = 1 - 2/p' lies in
    (0,1); tau_min is the dimension-dependent floor of |tau|.
    """

    n: int
    tau: float
    sigma: float
    p: float = field(init=False)
    p_prime: float = field(init=False)
    alpha: float = field(init=False)
    tau_min: float = field(init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise InvalidArgumentError("n must be an integer >= 3 (p' undefined otherwise)")
        if not self.sigma > 0:
            raise InvalidArgumentError("sigma must be positive")
        n = int(self.n)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "p", 2.0 * n / (n + 2))
        object.__setattr__(self, "p_prime", 2.0 * n / (n - 2))
        object.__setattr__(self, "alpha", 1.0 - 2.0 / self.p_prime)
        object.__setattr__(self, "tau_min", tau_min(n))


def harmonic_dimension(n: int, j: int) -> int:
    """Dimension of the degree-j harmonic polynomials in n variables,
    i.e. the multiplicity of the degree-j eigenvalue on the sphere S^{n-1}.
    """
    if j == 0:
        return 1
    if j == 1:
        return n
    return math.comb(n + j - 1, j) - math.comb(n + j - 3, j - 2)


def sphere_spectrum(n: int, j_max: int) -> Spectrum:
    """Spectrum of the round unit sphere S^{n-1} in R^n, truncated at degree j_max.

    lambda_j = sqrt(j*(j+n-2)) with the harmonic-polynomial multiplicities.
    """
    if int(n) != n or n < 2:
        raise InvalidArgumentError("sphere_spectrum requires integer n >= 2")
    if int(j_max) != j_max or j_max < 0:
        raise InvalidArgumentError("sphere_spectrum requires integer j_max >= 0")
    n, j_max = int(n), int(j_max)
    j = np.arange(j_max + 1, dtype=float)
    values = np.sqrt(j * (j + n - 2))
    mults = tuple(harmonic_dimension(n, jj) for jj in range(j_max + 1))
    return Spectrum(tuple(values.tolist()), mults, label=f"sphere(n={n})")


def circle_spectrum(j_max: int) -> Spectrum:
    """Spectrum of the unit circle: values 0..j_max, cos/sin pairs for j >= 1."""
    if int(j_max) != j_max or j_max < 0:
        raise InvalidArgumentError("circle_spectrum requires integer j_max >= 0")
    s = sphere_spectrum(2, int(j_max))
    return Spectrum(s.distinct_values, s.multiplicities, label="circle")


def load_spectrum(path: str | Path, label: str | None = None) -> Spectrum:
    """Parse a spectrum from UTF-8 text: one "value multiplicity" pair per
    line, '#' comments allowed, values in strictly ascending order.
    """
    path = Path(path)
    values: list[float] = []
    mults: list[int] = []
    with path.open("r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise SpectrumParseError(f"expected 'value multiplicity', got {raw!r}", line_no)
            try:
                value = float(parts[0])
                mult = int(parts[1])
            except ValueError as exc:
                raise SpectrumParseError(str(exc), line_no) from exc
            if value < 0:
                raise SpectrumParseError(f"negative value {value}", line_no)
            if mult < 1:
                raise SpectrumParseError(f"multiplicity {mult} < 1", line_no)
            if values and value == values[-1]:
                raise SpectrumParseError(f"duplicate value {value}", line_no)
            if values and value < values[-1]:
                raise SpectrumParseError(
                    f"unsorted value {value} after {values[-1]}", line_no
                )
            values.append(value)
            mults.append(mult)
    if not values:
        raise SpectrumParseError("file contains no spectrum rows", 0)
    return Spectrum(tuple(values), tuple(mults), label=label or str(path))


def dump_spectrum(spectrum: Spectrum) -> str:
    """Serialize a spectrum to the two-column text format accepted by
    :func:`load_spectrum`."""
    lines = [
        f"{v:.17g} {m}" for v, m in zip(spectrum.distinct_values, spectrum.multiplicities)
    ]
    return "\n".join(lines) + "\n"


def spectral_gap(spectrum: Spectrum) -> float:
    """Minimum gap between consecutive distinct values of the truncation.

    The true gap constant kappa is an infimum over the full sequence; the
    value returned here is computed over the stored truncation only and is
    therefore an upper estimate of kappa (exact for the circle, where every
    gap equals 1).
    """
    if len(spectrum) < 2:
        raise InvalidArgumentError("spectral_gap needs at least two distinct values")
    return float(np.diff(spectrum.values()).min())


def tau_min(n: int) -> float:
    """Floor of the admissible |tau|: max(4(n-1)/(n-2), n+1), exceeding 5
    for every n >= 3.  Computed in exact rational arithmetic.
    """
    if int(n) != n or n < 3:
        raise InvalidArgumentError("tau_min requires integer n >= 3")
    n = int(n)
    return float(max(Fraction(4 * (n - 1), n - 2), Fraction(n + 1)))


def is_admissible(tau: float, spectrum: Spectrum, sigma: float, n: int) -> bool:
    """Whether |tau| >= tau_min(n) and |tau| keeps distance >= sigma from
    every listed eigenvalue square root.

    The admissible set is symmetric in tau.  The caller is responsible for
    sigma <= kappa/2; a violation is reported as a warning, not enforced.
    The distance comparison carries one part in 1e12 of slack so that the
    worst-case placement tau = lambda_j + sigma stays admissible when the
    float sum rounds the distance a few ulps below sigma.
    """
    if len(spectrum) == 0:
        raise InvalidArgumentError("is_admissible requires a nonempty spectrum")
    if not sigma > 0:
        raise InvalidArgumentError("sigma must be positive")
    if len(spectrum) >= 2:
        kappa = spectral_gap(spectrum)
        if sigma > kappa / 2:
            warnings.warn(
                f"sigma={sigma} exceeds kappa/2={kappa / 2}; admissibility is "
                "evaluated anyway",
                UserWarning,
                stacklevel=2,
            )
    abs_tau = abs(float(tau))
    slack = 1e-12 * max(1.0, abs_tau)
    if abs_tau < tau_min(n) - slack:
        return False
    dist = np.min(np.abs(abs_tau - spectrum.values()))
    return bool(dist >= sigma - slack)

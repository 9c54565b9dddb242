"""Real spherical-harmonic analysis on S^2, spectral-cluster projectors,
and empirical cluster-constant estimation.

Conventions
-----------
The basis is real, fully normalized and free of the Condon-Shortley sign:

    Y(l, 0)        = N_{l0} P_l(cos theta)
    Y(l,  m), m>0  = sqrt(2) N_{lm} P_l^m(cos theta) cos(m phi)
    Y(l, -m), m>0  = sqrt(2) N_{lm} P_l^m(cos theta) sin(m phi)

with the associated Legendre functions taken without the (-1)^m factor.
Basis functions are indexed l*l + l + m, degree-major.  Quadrature is
Gauss-Legendre in cos(theta) times a uniform trapezoid in phi, exact for
products of harmonics up to the configured band limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import sph_harm_y

from .errors import InvalidArgumentError
from .spectra import Spectrum

__all__ = [
    "SphereGrid",
    "SphereField",
    "ClusterEstimate",
    "build_grid",
    "basis_index",
    "basis_degrees",
    "analyze",
    "synthesize",
    "project_cluster",
    "cluster_degrees",
    "mode_lambdas",
    "lp_norm_sphere",
    "estimate_cluster_constants",
    "field_to_text",
    "field_from_text",
]


@dataclass(frozen=True)
class SphereGrid:
    """Product quadrature grid on S^2, exact to the stated band limit."""

    band_limit: int
    n_theta: int
    n_phi: int
    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray  # flattened, theta-major; sums to 4*pi
    _basis_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_points(self) -> int:
        return self.n_theta * self.n_phi

    @property
    def nodes(self) -> np.ndarray:
        """(n_points, 2) array of (theta, phi) pairs, theta-major order."""
        th, ph = np.meshgrid(self.theta, self.phi, indexing="ij")
        return np.column_stack([th.ravel(), ph.ravel()])

    def basis(self, band_limit: int | None = None) -> np.ndarray:
        """Matrix of basis samples, shape ((J+1)^2, n_points).

        Cached per band limit; requesting a band above the grid's
        exactness raises invalid-argument.
        """
        J = self.band_limit if band_limit is None else int(band_limit)
        if J < 0:
            raise InvalidArgumentError("band limit must be >= 0")
        if J > self.band_limit:
            raise InvalidArgumentError(
                f"grid is exact to band {self.band_limit}, basis to {J} requested"
            )
        cached = self._basis_cache.get(J)
        if cached is None:
            cached = _basis_matrix(J, self.nodes)
            self._basis_cache[J] = cached
        return cached


@dataclass(frozen=True)
class SphereField:
    """Function on S^2 stored as real basis coefficients up to band_limit."""

    coeffs: np.ndarray
    band_limit: int
    grid: SphereGrid

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        object.__setattr__(self, "coeffs", coeffs)
        if coeffs.shape != ((self.band_limit + 1) ** 2,):
            raise InvalidArgumentError(
                f"coeffs must have shape ({(self.band_limit + 1) ** 2},) "
                f"for band limit {self.band_limit}, got {coeffs.shape}"
            )

    def with_coeffs(self, coeffs: np.ndarray) -> "SphereField":
        return SphereField(coeffs, self.band_limit, self.grid)


@dataclass(frozen=True)
class ClusterEstimate:
    """Best observed cluster ratios at index k.

    up4_ratio: max ||pi_k f||_{p'} / ||f||_2 over the trial family.
    up5_ratio: max ||pi_k f||_2  / ||f||_p over the trial family.

    holder_violations counts failures of the Hoelder chain
    ||pi_k f||_2^2 <= ||pi_k f||_{p'} ||f||_p across all trials, plus
    failures of the derived ratio comparison up5 <= up4 on in-cluster
    trials (where pi_k f = f makes it a consequence of the chain; for
    functions with out-of-cluster mass the ratio comparison is not
    implied and can genuinely fail).
    """

    k: int
    up4_ratio: float
    up5_ratio: float
    holder_violations: int


def basis_index(l: int, m: int) -> int:
    if abs(m) > l:
        raise InvalidArgumentError(f"order |m|={abs(m)} exceeds degree l={l}")
    return l * l + l + m


def basis_degrees(band_limit: int) -> np.ndarray:
    """Degree of each basis slot, shape ((J+1)^2,)."""
    return np.repeat(np.arange(band_limit + 1), 2 * np.arange(band_limit + 1) + 1)


def _basis_matrix(band_limit: int, nodes: np.ndarray) -> np.ndarray:
    th = nodes[:, 0]
    ph = nodes[:, 1]
    n_basis = (band_limit + 1) ** 2
    out = np.empty((n_basis, nodes.shape[0]))
    sqrt2 = np.sqrt(2.0)
    for l in range(band_limit + 1):
        out[basis_index(l, 0)] = np.real(sph_harm_y(l, 0, th, ph))
        for m in range(1, l + 1):
            # (-1)^m strips the Condon-Shortley sign carried by scipy
            y = sph_harm_y(l, m, th, ph) * ((-1) ** m * sqrt2)
            out[basis_index(l, m)] = np.real(y)
            out[basis_index(l, -m)] = np.imag(y)
    return out


def build_grid(band_limit: int, n_theta: int | None = None, n_phi: int | None = None) -> SphereGrid:
    """Quadrature grid exact for products of harmonics of degree <= band_limit.

    Defaults n_theta = band_limit + 1 Gauss-Legendre colatitude nodes and
    n_phi = 2*band_limit + 1 uniform longitudes, the minimal exact sizes.
    """
    if int(band_limit) != band_limit or band_limit < 0:
        raise InvalidArgumentError("band_limit must be an integer >= 0")
    band_limit = int(band_limit)
    n_theta = band_limit + 1 if n_theta is None else int(n_theta)
    n_phi = 2 * band_limit + 1 if n_phi is None else int(n_phi)
    if n_theta < band_limit + 1 or n_phi < 2 * band_limit + 1:
        raise InvalidArgumentError("grid too small to be exact at the band limit")
    x, w_gl = np.polynomial.legendre.leggauss(n_theta)
    order = np.argsort(-x)  # theta ascending = cos(theta) descending
    theta = np.arccos(x[order])
    w_theta = w_gl[order]
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    weights = np.outer(w_theta, np.full(n_phi, 2.0 * np.pi / n_phi)).ravel()
    return SphereGrid(band_limit, n_theta, n_phi, theta, phi, weights)


def analyze(grid: SphereGrid, samples: np.ndarray, band_limit: int | None = None) -> SphereField:
    """Quadrature inner products of grid samples against the real basis."""
    band_limit = grid.band_limit if band_limit is None else int(band_limit)
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.shape != (grid.n_points,):
        raise InvalidArgumentError(
            f"samples must have {grid.n_points} entries for this grid, got {samples.shape}"
        )
    coeffs = grid.basis(band_limit) @ (grid.weights * samples)
    return SphereField(coeffs, band_limit, grid)


def synthesize(field: SphereField) -> np.ndarray:
    """Evaluate a coefficient field on its grid (inverse of analyze at the
    exact band limit)."""
    return field.coeffs @ field.grid.basis(field.band_limit)


def cluster_degrees(spectrum: Spectrum, k: int, band_limit: int) -> list[int]:
    """Degrees l <= band_limit whose lambda_l lies in the window [k, k+1).

    The spectrum is read positionally: distinct_values[l] is the degree-l
    value.  Raises invalid-argument when the truncation cannot decide
    membership for every degree up to the band limit.
    """
    if int(k) != k or k < 0:
        raise InvalidArgumentError("cluster index must be an integer >= 0")
    values = spectrum.distinct_values
    if len(values) <= band_limit and values[-1] < k + 1:
        raise InvalidArgumentError(
            f"spectrum truncated at {len(values)} values cannot resolve cluster {k} "
            f"for band limit {band_limit}"
        )
    out = []
    for l in range(band_limit + 1):
        lam = values[l] if l < len(values) else np.inf
        if k <= lam < k + 1:
            out.append(l)
    return out


def project_cluster(field: SphereField, k: int, spectrum: Spectrum) -> SphereField:
    """Keep exactly the coefficients with k <= lambda_l < k+1, zero the rest.

    Windows are half-open, so an integer lambda_l belongs to the window it
    starts.  The projector is an orthogonal projection on coefficients:
    idempotent and self-adjoint by construction.
    """
    degrees = cluster_degrees(spectrum, k, field.band_limit)
    mask = np.isin(basis_degrees(field.band_limit), degrees)
    return field.with_coeffs(np.where(mask, field.coeffs, 0.0))


def mode_lambdas(spectrum: Spectrum, band_limit: int) -> np.ndarray:
    """Per-basis-slot lambda values, degree-major, for coupling to product
    fields on R x S^2."""
    if len(spectrum) < band_limit + 1:
        raise InvalidArgumentError(
            f"spectrum has {len(spectrum)} values, band limit {band_limit} needs "
            f"{band_limit + 1}"
        )
    values = spectrum.values()[: band_limit + 1]
    return np.repeat(values, 2 * np.arange(band_limit + 1) + 1)


def lp_norm_sphere(samples: np.ndarray, p: float, grid: SphereGrid) -> float:
    """Quadrature L^p norm of grid samples, (sum_i w_i |f_i|^p)^(1/p)."""
    if not p >= 1:
        raise InvalidArgumentError("lp_norm_sphere requires p >= 1")
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.shape != (grid.n_points,):
        raise InvalidArgumentError("samples do not match the grid")
    if p == 2:
        return float(np.sqrt(np.sum(grid.weights * samples * samples)))
    return float(np.sum(grid.weights * np.abs(samples) ** p) ** (1.0 / p))


def _norm_grid(band_limit: int, p_prime: float) -> SphereGrid:
    # exact for |f|^q with integer q <= p_prime when f is band-limited
    factor = max(3, int(np.ceil(p_prime / 2.0)))
    return build_grid(factor * max(band_limit, 1))


def estimate_cluster_constants(
    k_max: int,
    p_prime: float,
    trials: int,
    seed: int,
    spectrum: Spectrum | None = None,
    band_limit: int | None = None,
) -> list[ClusterEstimate]:
    """Empirical cluster constants on S^2 for k = 0..k_max.

    For each window the trial family holds the zonal harmonics of the
    cluster, random in-cluster coefficient vectors, and random full-band
    vectors; the best observed ratios for the L^2 -> L^{p'} and
    L^p -> L^2 cluster bounds are reported.  Deterministic given seed.
    """
    if trials < 1:
        raise InvalidArgumentError("trials must be >= 1")
    if not p_prime > 2:
        raise InvalidArgumentError("p_prime must exceed 2")
    if int(k_max) != k_max or k_max < 0:
        raise InvalidArgumentError("k_max must be an integer >= 0")
    k_max = int(k_max)
    band_limit = k_max if band_limit is None else int(band_limit)
    if spectrum is None:
        from .spectra import sphere_spectrum

        spectrum = sphere_spectrum(3, band_limit + 2)
    p = p_prime / (p_prime - 1.0)
    grid = _norm_grid(band_limit, p_prime)
    basis = grid.basis(band_limit)
    degrees = basis_degrees(band_limit)
    n_basis = (band_limit + 1) ** 2

    def ratios(coeffs: np.ndarray, mask: np.ndarray) -> tuple[float, float, float, float]:
        pc = np.where(mask, coeffs, 0.0)
        norm_f2 = float(np.linalg.norm(coeffs))
        norm_pc2 = float(np.linalg.norm(pc))
        norm_pc_pp = lp_norm_sphere(pc @ basis, p_prime, grid)
        norm_f_p = lp_norm_sphere(coeffs @ basis, p, grid)
        return norm_pc_pp / norm_f2, norm_pc2 / norm_f_p, norm_pc2, norm_pc_pp * norm_f_p

    out: list[ClusterEstimate] = []
    for k in range(k_max + 1):
        in_cluster = cluster_degrees(spectrum, k, band_limit)
        mask = np.isin(degrees, in_cluster)
        trial_coeffs: list[tuple[np.ndarray, bool]] = []
        for l in in_cluster:
            zonal = np.zeros(n_basis)
            zonal[basis_index(l, 0)] = 1.0
            trial_coeffs.append((zonal, True))
        for i in range(trials):
            rng = np.random.default_rng((seed, k, 0, i))
            c = np.zeros(n_basis)
            c[mask] = rng.standard_normal(int(mask.sum()))
            if np.any(c):
                trial_coeffs.append((c, True))
            rng = np.random.default_rng((seed, k, 1, i))
            trial_coeffs.append((rng.standard_normal(n_basis), False))
        up4_best = 0.0
        up5_best = 0.0
        violations = 0
        for c, in_cluster_only in trial_coeffs:
            up4, up5, norm_pc2, chain_rhs = ratios(c, mask)
            up4_best = max(up4_best, up4)
            up5_best = max(up5_best, up5)
            if norm_pc2**2 > chain_rhs * (1.0 + 1e-12):
                violations += 1
            if in_cluster_only and up5 > up4 * (1.0 + 1e-12):
                violations += 1
        out.append(ClusterEstimate(k, up4_best, up5_best, violations))
    return out


def field_to_text(field: SphereField) -> str:
    """Two-column "index coefficient" fixture format."""
    lines = [f"{i} {c:.17g}" for i, c in enumerate(field.coeffs)]
    return "\n".join(lines) + "\n"


def field_from_text(text: str, band_limit: int, grid: SphereGrid) -> SphereField:
    coeffs = np.zeros((band_limit + 1) ** 2)
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InvalidArgumentError(f"line {line_no}: expected 'index coefficient'")
        idx = int(parts[0])
        if not 0 <= idx < coeffs.size:
            raise InvalidArgumentError(f"line {line_no}: index {idx} out of range")
        coeffs[idx] = float(parts[1])
    return SphereField(coeffs, band_limit, grid)

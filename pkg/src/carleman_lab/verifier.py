"""Numerical checks for every displayed step of the Carleman argument:
the sum-vs-integral comparison that is valid only under a monotonicity
premise (including its counterexamples), the cluster-sum and integral
envelope bounds with their |t-s|^{-2/p'} normalizations, per-cluster
A_k functionals, the end-to-end Carleman ratio and its sigma scaling,
and a Hardy-Littlewood-Sobolev scale-invariance probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.signal import fftconvolve

from .errors import (
    DegenerateInputError,
    InvalidArgumentError,
    QuadratureFailureError,
    RegimeError,
)
from .harmonics import SphereGrid, build_grid
from .multiplier import multiplier_envelope
from .solver import (
    ProductField,
    conjugated_apply,
    gaussian_bump,
    make_grid,
    product_lp_norm,
    sphere_field,
)
from .spectra import CarlemanParams, Spectrum, spectral_gap

__all__ = [
    "InequalityReport",
    "ConstantFit",
    "fit_power_law",
    "check_flawed_inequality",
    "flaw_scan",
    "g_profile",
    "h_profile",
    "sigma_profile",
    "kernel_sum_bound",
    "i_tau_bound",
    "j_tau_bound",
    "integral_bounds",
    "sphere_norm_profile",
    "compute_A_k",
    "cluster_chain_check",
    "carleman_ratio",
    "resonant_bump_field",
    "random_band_field",
    "carleman_sweep_table",
    "constant_sweep",
    "hls_ratio",
    "hls_dilation_table",
    "hls_probe",
]


@dataclass(frozen=True)
class InequalityReport:
    """One checked inequality at one parameter point; holds <=> margin >= 0."""

    name: str
    parameter_point: dict
    lhs: float
    rhs: float
    margin: float
    holds: bool

    def as_row(self) -> dict:
        row = {"name": self.name}
        for key in sorted(self.parameter_point):
            row[key] = self.parameter_point[key]
        row.update(lhs=self.lhs, rhs=self.rhs, margin=self.margin, holds=int(self.holds))
        return row


def _report(name: str, point: dict, lhs: float, rhs: float) -> InequalityReport:
    margin = rhs - lhs
    return InequalityReport(name, dict(point), float(lhs), float(rhs),
                            float(margin), bool(margin >= 0))


@dataclass(frozen=True)
class ConstantFit:
    """Power-law fit on log-log axes; exponent is NaN for degenerate fits."""

    exponent: float
    constant: float
    r_squared: float
    window: tuple[float, float]


def fit_power_law(x, y) -> ConstantFit:
    """Least-squares fit y ~ constant * x^exponent over positive samples."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size == 0:
        raise InvalidArgumentError("fit_power_law needs matching nonempty samples")
    if np.any(x <= 0) or np.any(y <= 0):
        raise InvalidArgumentError("fit_power_law needs positive samples")
    window = (float(x.min()), float(x.max()))
    if x.size == 1 or np.allclose(x, x[0]):
        return ConstantFit(float("nan"), float(y.max()), float("nan"), window)
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    fitted = slope * lx + intercept
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    return ConstantFit(float(slope), float(np.exp(intercept)), float(r2), window)


# --- the sum-vs-integral comparison and its failure region ---------------


def check_flawed_inequality(tau: float, t: float, n: int) -> InequalityReport:
    """Compare sum_{1<=k<=tau-2} k^{-2/n} e^{-((tau-2)-k)|t|} against the
    integral int_0^{tau-2} r^{-2/n} e^{-((tau-2)-r)|t|} dr.

    The comparison holds whenever the integrand is nonincreasing in r,
    i.e. exactly when |t|(tau-2) <= 2/n; that premise flag is recorded in
    the parameter point.  The integrable endpoint singularity r^{-2/n} is
    removed by the substitution r = v^{n/(n-2)} before quadrature.
    """
    if not tau > 4:
        raise InvalidArgumentError("the comparison is stated for tau > 4")
    if int(n) != n or n < 3:
        raise InvalidArgumentError("n must be an integer >= 3")
    n = int(n)
    beta = 2.0 / n
    abs_t = abs(float(t))
    upper = tau - 2.0
    k = np.arange(1, int(math.floor(upper + 1e-12)) + 1, dtype=float)
    lhs = float(np.sum(k ** (-beta) * np.exp(-(upper - k) * abs_t)))
    gamma_exp = n / (n - 2.0)  # r = v^gamma_exp removes the singularity

    def integrand(v):
        return gamma_exp * np.exp(-(upper - v**gamma_exp) * abs_t)

    rhs, err = quad(integrand, 0.0, upper ** (1.0 / gamma_exp),
                    epsabs=1e-12, epsrel=1e-12, limit=200)
    if not np.isfinite(rhs) or err > 1e-8 * max(1.0, abs(rhs)):
        raise QuadratureFailureError(f"untrusted integral: value={rhs}, err={err}")
    premise = abs_t * upper <= beta
    point = {"tau": float(tau), "t": float(t), "n": float(n),
             "premise": float(premise)}
    return _report("sum_vs_integral", point, lhs, rhs)


def flaw_scan(
    taus=None,
    ts=None,
    ns=(3, 4, 5),
    min_margin: float = 0.01,
) -> tuple[list[InequalityReport], InequalityReport | None]:
    """Scan a grid for violations of the sum-vs-integral comparison.

    Returns every report plus the first violation whose relative excess
    lhs/rhs - 1 reaches min_margin (scan order: n, then tau, then t).
    """
    taus = np.arange(5.0, 13.0) if taus is None else np.asarray(taus, dtype=float)
    ts = np.logspace(-2, 0.5, 25) if ts is None else np.asarray(ts, dtype=float)
    reports: list[InequalityReport] = []
    counterexample = None
    for n in ns:
        for tau in taus:
            for t in ts:
                rep = check_flawed_inequality(tau, t, n)
                reports.append(rep)
                if (
                    counterexample is None
                    and not rep.holds
                    and rep.lhs > rep.rhs * (1.0 + min_margin)
                ):
                    counterexample = rep
    return reports, counterexample


# --- cluster-sum and integral envelopes -----------------------------------


def g_profile(rho, tau: float, dt: float, p_prime: float):
    """rho^{2/p'-1} e^{-(tau-1-rho) dt}, the summand of the below-tau range."""
    rho = np.asarray(rho, dtype=float)
    return rho ** (2.0 / p_prime - 1.0) * np.exp(-(tau - 1.0 - rho) * dt)


def h_profile(rho, tau: float, dt: float, p_prime: float):
    """rho^{2/p'-1} e^{-(rho-tau) dt}, the summand of the above-tau range."""
    rho = np.asarray(rho, dtype=float)
    return rho ** (2.0 / p_prime - 1.0) * np.exp(-(rho - tau) * dt)


def sigma_profile(rho, tau: float, p_prime: float):
    """rho^{2/p'-1} (floor(tau)-1-rho)^{-2/p'}, nonincreasing on
    [1, alpha*(floor(tau)-1)]."""
    rho = np.asarray(rho, dtype=float)
    top = np.floor(tau) - 1.0 - rho
    return rho ** (2.0 / p_prime - 1.0) * top ** (-2.0 / p_prime)


def _dim_from_p_prime(p_prime: float) -> float:
    if not p_prime > 2:
        raise InvalidArgumentError("p_prime must exceed 2")
    return 2.0 * p_prime / (p_prime - 2.0)


def _tau_floor_real(n: float) -> float:
    return max(4.0 * (n - 1.0) / (n - 2.0), n + 1.0)


def kernel_sum_bound(
    tau: float, dt: float, p_prime: float, c: float = 1.0
) -> InequalityReport:
    """Sum of g over k = 2..floor(tau)-2 against c * dt^{-2/p'}.

    The parameter point records the normalized product lhs * dt^{2/p'},
    the quantity whose boundedness over (tau, dt) sweeps is the claim.
    """
    n = _dim_from_p_prime(p_prime)
    if tau < _tau_floor_real(n):
        raise InvalidArgumentError(
            f"tau={tau} is below the admissible floor {_tau_floor_real(n):.6g}"
        )
    if not dt > 0:
        raise InvalidArgumentError("dt must be positive")
    alpha = 1.0 - 2.0 / p_prime
    floor_tau = math.floor(tau)
    split = math.floor(alpha * (floor_tau - 1))
    if not 2 <= split <= floor_tau - 3:
        raise InvalidArgumentError(
            "tau floor fails the split condition 2 <= floor(alpha(floor(tau)-1)) "
            "<= floor(tau)-3"
        )
    k = np.arange(2, floor_tau - 1, dtype=float)
    lhs = float(np.sum(g_profile(k, tau, dt, p_prime)))
    normalized = lhs * dt ** (2.0 / p_prime)
    rhs = c * dt ** (-2.0 / p_prime)
    point = {"tau": float(tau), "dt": float(dt), "p_prime": float(p_prime),
             "normalized": normalized}
    return _report("cluster_sum", point, lhs, rhs)


def _checked_quad(func, a, b, what: str) -> float:
    value, err = quad(func, a, b, epsabs=1e-11, epsrel=1e-11, limit=400)
    if not np.isfinite(value) or err > 1e-7 * max(1.0, abs(value)):
        raise QuadratureFailureError(f"untrusted {what}: value={value}, err={err}")
    return float(value)


def i_tau_bound(tau: float, dt: float, p_prime: float, c: float = 1.0) -> InequalityReport:
    """Integral of g over [1, floor(tau)-2], defined for dt <= gamma =
    alpha/(floor(tau)-2) (the monotone case split); larger dt raises
    regime-error by design."""
    n = _dim_from_p_prime(p_prime)
    if tau < _tau_floor_real(n):
        raise InvalidArgumentError(f"tau={tau} below the admissible floor")
    if not dt > 0:
        raise InvalidArgumentError("dt must be positive")
    alpha = 1.0 - 2.0 / p_prime
    floor_tau = math.floor(tau)
    gamma = alpha / (floor_tau - 2)
    if dt > gamma:
        raise RegimeError(f"dt={dt} exceeds gamma={gamma:.6g}; below-tau case split fails")
    lhs = _checked_quad(lambda r: g_profile(r, tau, dt, p_prime), 1.0,
                        floor_tau - 2.0, "below-tau integral")
    normalized = lhs * dt ** (2.0 / p_prime)
    rhs = c * dt ** (-2.0 / p_prime)
    point = {"tau": float(tau), "dt": float(dt), "p_prime": float(p_prime),
             "gamma": gamma, "normalized": normalized}
    return _report("below_tau_integral", point, lhs, rhs)


def j_tau_bound(tau: float, dt: float, p_prime: float, c: float = 1.0) -> InequalityReport:
    """Integral of h over [floor(tau)+1, infinity), exponential tail mapped
    to a finite interval before quadrature."""
    n = _dim_from_p_prime(p_prime)
    if tau < _tau_floor_real(n):
        raise InvalidArgumentError(f"tau={tau} below the admissible floor")
    if not dt > 0:
        raise InvalidArgumentError("dt must be positive")
    lower = math.floor(tau) + 1.0
    head = np.exp(-(lower - tau) * dt) / dt

    def integrand(y):
        # rho = lower + y/dt; h(rho) dr = head * (rho)^{2/p'-1} e^{-y} dy
        rho = lower + y / dt
        return rho ** (2.0 / p_prime - 1.0) * np.exp(-y)

    lhs = head * _checked_quad(integrand, 0.0, 60.0, "above-tau integral")
    normalized = lhs * dt ** (2.0 / p_prime)
    rhs = c * dt ** (-2.0 / p_prime)
    point = {"tau": float(tau), "dt": float(dt), "p_prime": float(p_prime),
             "small_regime": float((math.floor(tau) + 1) * dt < 1.0),
             "normalized": normalized}
    return _report("above_tau_integral", point, lhs, rhs)


def integral_bounds(
    tau: float, dt: float, p_prime: float, c: float = 1.0
) -> tuple[InequalityReport, InequalityReport]:
    """Both range integrals at one (tau, dt); raises regime-error when the
    below-tau branch is outside its case split."""
    return (i_tau_bound(tau, dt, p_prime, c), j_tau_bound(tau, dt, p_prime, c))


# --- per-cluster functionals and the Carleman ratio -----------------------


def sphere_norm_profile(field: ProductField, p: float, grid: SphereGrid) -> np.ndarray:
    """||f(., s)||_{L^p(S^2)} at every t node, via synthesis on the grid."""
    band = int(round(np.sqrt(field.n_slots))) - 1
    if (band + 1) ** 2 != field.n_slots:
        raise InvalidArgumentError("field slots do not form a full sphere basis")
    samples = field.coeffs.T @ grid.basis(band)
    if p == 2:
        return np.sqrt((samples**2) @ grid.weights)
    return (np.abs(samples) ** p @ grid.weights) ** (1.0 / p)


def compute_A_k(
    k: int,
    t: float,
    field: ProductField,
    tau: float,
    sigma: float,
    grid: SphereGrid,
    profile: np.ndarray | None = None,
) -> float:
    """(1+k)^{2/p'} * trapezoid_s envelope_k(t - s) ||f(., s)||_{L^p(S^2)}."""
    if profile is None:
        profile = sphere_norm_profile(field, field.params.p, grid)
    weights = np.full(field.t.size, field.h)
    weights[0] = weights[-1] = field.h / 2
    env = multiplier_envelope(k, None, tau, sigma, float(t) - field.t)
    p_prime = field.params.p_prime
    return float((1.0 + k) ** (2.0 / p_prime) * np.sum(weights * env * profile))


def cluster_chain_check(
    u: ProductField,
    tau: float,
    sigma: float,
    grid: SphereGrid,
    k_max: int | None = None,
) -> dict:
    """Pointwise comparison ||u(t,.)||_{p'} vs sum_k A_k(t) built from
    f = (conjugated operator) u.  Returns the profiles and the supremum of
    their ratio; a single empirical constant should dominate it across a
    test suite."""
    f = conjugated_apply(u, tau)
    prof = sphere_norm_profile(f, f.params.p, grid)
    lhs = sphere_norm_profile(u, u.params.p_prime, grid)
    if k_max is None:
        k_max = int(math.floor(float(np.max(u.lambdas))))
    weights = np.full(u.t.size, u.h)
    weights[0] = weights[-1] = u.h / 2
    dt_matrix = u.t[:, None] - u.t[None, :]
    rhs = np.zeros_like(lhs)
    p_prime = u.params.p_prime
    for k in range(k_max + 1):
        env = multiplier_envelope(k, None, tau, sigma, dt_matrix)
        rhs += (1.0 + k) ** (2.0 / p_prime) * (env @ (weights * prof))
    mask = rhs > 0
    ratio = float(np.max(lhs[mask] / rhs[mask])) if np.any(mask) else 0.0
    return {"t": u.t, "lhs": lhs, "rhs": rhs, "sup_ratio": ratio, "k_max": k_max}


def carleman_ratio(
    u: ProductField, tau: float | None = None, grid: SphereGrid | None = None
) -> float:
    """||u||_{p'} / ||(conjugated operator) u||_p on the product domain."""
    tau = u.params.tau if tau is None else float(tau)
    f = conjugated_apply(u, tau)
    denom = product_lp_norm(f, u.params.p, grid)
    if denom == 0.0:
        raise DegenerateInputError("conjugated image vanishes; ratio undefined")
    return product_lp_norm(u, u.params.p_prime, grid) / denom


# --- sigma sweep -----------------------------------------------------------


def resonant_bump_field(
    spectrum: Spectrum,
    degree: int,
    width: float,
    h: float,
    params: CarlemanParams,
) -> ProductField:
    """Zonal bump concentrated on one transverse degree, with a Gaussian
    time profile wide enough to see the resonance; the grid is sized so
    boundary values stay under the compact-support surrogate threshold."""
    t = make_grid(max(4.9 * width, 3.0), h)
    n_slots = (degree + 1) ** 2
    coeffs = np.zeros((n_slots, t.size))
    coeffs[degree * degree + degree] = gaussian_bump(t, 0.0, width)
    return sphere_field(spectrum, degree, t, coeffs, params)


def random_band_field(
    spectrum: Spectrum,
    band_limit: int,
    rng: np.random.Generator,
    h: float,
    params: CarlemanParams,
    half_width: float = 12.5,
) -> ProductField:
    """Random superposition: every slot gets an independent Gaussian time
    bump with random amplitude, center and width."""
    t = make_grid(half_width, h)
    n_slots = (band_limit + 1) ** 2
    amps = rng.standard_normal(n_slots)
    centers = rng.uniform(-2.0, 2.0, n_slots)
    widths = rng.uniform(0.5, 2.0, n_slots)
    coeffs = amps[:, None] * np.exp(
        -(((t[None, :] - centers[:, None]) / widths[:, None]) ** 2)
    )
    return sphere_field(spectrum, band_limit, t, coeffs, params)


def carleman_sweep_table(
    spectrum: Spectrum,
    n: int,
    sigma_list,
    trials: int,
    seed: int,
    resonant_degree: int = 8,
    band_limit: int = 10,
    h: float = 0.02,
) -> list[dict]:
    """Observed Carleman ratios per sigma, with tau placed at distance
    exactly sigma above the resonant eigenvalue (the worst admissible
    point).  The family holds zonal resonant bumps of widths scaled like
    1/sigma plus random superpositions; deterministic given seed."""
    sigma_list = list(sigma_list)
    if not sigma_list:
        raise InvalidArgumentError("sigma_list must be nonempty")
    if trials < 0:
        raise InvalidArgumentError("trials must be >= 0")
    kappa = spectral_gap(spectrum)
    for sigma in sigma_list:
        if not 0 < sigma <= kappa / 2:
            raise InvalidArgumentError(
                f"sigma={sigma} is outside (0, kappa/2] with kappa={kappa:.6g}"
            )
    lam_star = spectrum.distinct_values[resonant_degree]
    grid_resonant = build_grid(3 * resonant_degree)
    grid_random = build_grid(3 * band_limit)
    rows: list[dict] = []
    for si, sigma in enumerate(sigma_list):
        tau = lam_star + sigma
        params = CarlemanParams(n=n, tau=tau, sigma=sigma)
        widths = sorted({2.0, 0.5 / sigma, 1.0 / sigma, 2.0 / sigma})
        for w in widths:
            u = resonant_bump_field(spectrum, resonant_degree, w, h, params)
            ratio = carleman_ratio(u, tau, grid_resonant)
            rows.append(
                {"sigma": float(sigma), "tau": float(tau), "kind": "resonant",
                 "scale": float(w), "trial": -1, "ratio": float(ratio)}
            )
        for i in range(trials):
            rng = np.random.default_rng((seed, si, i))
            u = random_band_field(spectrum, band_limit, rng, h, params)
            ratio = carleman_ratio(u, tau, grid_random)
            rows.append(
                {"sigma": float(sigma), "tau": float(tau), "kind": "random",
                 "scale": 0.0, "trial": i, "ratio": float(ratio)}
            )
    return rows


def max_ratio_per_sigma(rows: list[dict]) -> dict[float, float]:
    out: dict[float, float] = {}
    for row in rows:
        s = row["sigma"]
        out[s] = max(out.get(s, 0.0), row["ratio"])
    return out


def constant_sweep(
    spectrum: Spectrum,
    n: int,
    sigma_list,
    trials: int,
    seed: int,
    **kwargs,
) -> ConstantFit:
    """Fit of the per-sigma maximum Carleman ratio against sigma on log-log
    axes; a single-entry sigma list yields a degenerate fit with NaN
    exponent."""
    rows = carleman_sweep_table(spectrum, n, sigma_list, trials, seed, **kwargs)
    per_sigma = max_ratio_per_sigma(rows)
    sigmas = np.array(sorted(per_sigma))
    maxima = np.array([per_sigma[s] for s in sigmas])
    return fit_power_law(sigmas, maxima)


# --- Hardy-Littlewood-Sobolev probe ---------------------------------------


def _hls_cell_weights(n_nodes: int, h: float, beta: float) -> np.ndarray:
    """Exact cell integrals of |eta|^{-beta} on offsets -(n-1)..(n-1);
    averaging over cells removes the singular quadrature error at the
    diagonal."""
    k = np.arange(-(n_nodes - 1), n_nodes)
    a = (np.abs(k) - 0.5) * h
    b = (np.abs(k) + 0.5) * h
    out = np.empty(k.size)
    zero = k == 0
    out[zero] = 2.0 * (h / 2.0) ** (1.0 - beta) / (1.0 - beta)
    out[~zero] = (b[~zero] ** (1.0 - beta) - a[~zero] ** (1.0 - beta)) / (1.0 - beta)
    return out


def hls_ratio(samples: np.ndarray, p: float, t: np.ndarray) -> float:
    """|| |.|^{-2/p'} * f ||_{p'} / ||f||_p on a uniform 1-D grid."""
    samples = np.asarray(samples, dtype=float)
    t = np.asarray(t, dtype=float)
    h = float(t[1] - t[0])
    p_prime = p / (p - 1.0)
    beta = 2.0 / p_prime
    norm_f = float(np.sum(np.abs(samples) ** p) * h) ** (1.0 / p)
    if norm_f == 0.0:
        raise DegenerateInputError("zero test function in the convolution probe")
    weights = _hls_cell_weights(samples.size, h, beta)
    conv = fftconvolve(weights, samples, mode="valid")
    norm_conv = float(np.sum(np.abs(conv) ** p_prime) * h) ** (1.0 / p_prime)
    return norm_conv / norm_f


def hls_dilation_table(f, p: float, t: np.ndarray, deltas=(0.5, 1.0, 2.0)) -> list[dict]:
    """Ratios for the dilated family f(./delta); exact scale invariance is
    the exponent identity 1 + 1/p' = 1/p + 2/p'."""
    rows = []
    for delta in deltas:
        samples = np.asarray(f(np.asarray(t) / delta), dtype=float)
        rows.append({"delta": float(delta), "ratio": hls_ratio(samples, p, t)})
    return rows


def hls_probe(p: float, f_family, t: np.ndarray, deltas=(0.5, 1.0, 2.0)) -> ConstantFit:
    """Dilation-invariance fit of the convolution ratio over a family of
    test functions; the fitted exponent should vanish and the constant
    records the largest observed ratio."""
    p_prime = p / (p - 1.0) if p > 1 else float("inf")
    if not (1.0 < p < p_prime):
        raise InvalidArgumentError("p must lie strictly between 1 and its conjugate")
    log_d: list[float] = []
    log_r: list[float] = []
    best = 0.0
    for f in f_family:
        try:
            rows = hls_dilation_table(f, p, t, deltas)
        except DegenerateInputError:
            continue
        ratios = np.array([row["ratio"] for row in rows])
        best = max(best, float(ratios.max()))
        ld = np.log(np.asarray(deltas, dtype=float))
        lr = np.log(ratios)
        log_d.extend(ld - ld.mean())
        log_r.extend(lr - lr.mean())
    if not log_d:
        raise DegenerateInputError("no usable test functions in the family")
    x = np.asarray(log_d)
    y = np.asarray(log_r)
    denom = float(np.sum(x * x))
    slope = float(np.sum(x * y) / denom) if denom > 0 else float("nan")
    ss_tot = float(np.sum(y * y))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - float(np.sum((y - slope * x) ** 2)) / ss_tot)
    return ConstantFit(slope, best, r2, (float(min(deltas)), float(max(deltas))))

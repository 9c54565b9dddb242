"""Numerical laboratory for Lp-dual Carleman estimates on cylinders R x M'.

Subpackages by concern: model spectra and admissibility (spectra), real
spherical harmonics and cluster projectors on S^2 (harmonics), the
closed-form resolvent kernel (multiplier), the mode-decoupled conjugated
solver (solver, convolve), the inequality verification harness (verifier),
and report serialization plus the batch CLI (reports, cli).
"""

__version__ = "0.1.0"

from . import errors
from .convolve import HAVE_EXTENSION, backend
from .harmonics import (
    ClusterEstimate,
    SphereField,
    SphereGrid,
    analyze,
    build_grid,
    estimate_cluster_constants,
    lp_norm_sphere,
    project_cluster,
    synthesize,
)
from .multiplier import (
    MultiplierKernel,
    multiplier_closed,
    multiplier_envelope,
    multiplier_quadrature,
)
from .solver import (
    ProductField,
    conjugated_apply,
    export_field,
    import_field,
    make_grid,
    product_lp_norm,
    solve_conjugated,
    sphere_field,
)
from .spectra import (
    CarlemanParams,
    Spectrum,
    circle_spectrum,
    is_admissible,
    load_spectrum,
    sphere_spectrum,
    spectral_gap,
    tau_min,
)
from .verifier import (
    ConstantFit,
    InequalityReport,
    carleman_ratio,
    check_flawed_inequality,
    compute_A_k,
    constant_sweep,
    fit_power_law,
    hls_probe,
    integral_bounds,
    kernel_sum_bound,
)
from .reports import emit_report

__all__ = [
    "__version__",
    "errors",
    "HAVE_EXTENSION",
    "backend",
    "Spectrum",
    "CarlemanParams",
    "sphere_spectrum",
    "circle_spectrum",
    "load_spectrum",
    "spectral_gap",
    "tau_min",
    "is_admissible",
    "SphereGrid",
    "SphereField",
    "ClusterEstimate",
    "build_grid",
    "analyze",
    "synthesize",
    "project_cluster",
    "lp_norm_sphere",
    "estimate_cluster_constants",
    "MultiplierKernel",
    "multiplier_closed",
    "multiplier_quadrature",
    "multiplier_envelope",
    "ProductField",
    "make_grid",
    "sphere_field",
    "conjugated_apply",
    "solve_conjugated",
    "product_lp_norm",
    "export_field",
    "import_field",
    "InequalityReport",
    "ConstantFit",
    "fit_power_law",
    "check_flawed_inequality",
    "kernel_sum_bound",
    "integral_bounds",
    "compute_A_k",
    "carleman_ratio",
    "constant_sweep",
    "hls_probe",
    "emit_report",
]

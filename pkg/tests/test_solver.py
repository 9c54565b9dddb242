import numpy as np
import pytest

from carleman_lab.errors import (
    AdmissibilityError,
    ConvergenceError,
    InvalidArgumentError,
    ResolutionError,
)
from carleman_lab.harmonics import basis_index, build_grid, mode_lambdas
from carleman_lab.multiplier import MultiplierKernel
from carleman_lab.solver import (
    ProductField,
    conjugated_apply,
    export_field,
    gaussian_bump,
    import_field,
    make_grid,
    poly_bump,
    product_lp_norm,
    product_lp_norm_samples,
    solve_conjugated,
    sphere_field,
)
from carleman_lab.spectra import CarlemanParams, sphere_spectrum

LAM2 = float(np.sqrt(6.0))  # degree-2 value on S^2


def single_mode_field(lam, tau, sigma=0.25, h=0.01, half_width=6.0, profile=None):
    t = make_grid(half_width, h)
    data = gaussian_bump(t) if profile is None else profile(t)
    params = CarlemanParams(n=3, tau=tau, sigma=sigma)
    return ProductField(t, data[None, :], np.array([lam]), params)


class TestProductField:
    def test_grid_validation(self):
        params = CarlemanParams(n=3, tau=8.0, sigma=0.25)
        with pytest.raises(InvalidArgumentError):
            ProductField(np.array([0.0, 0.1, 0.3]), np.zeros((1, 3)), np.zeros(1), params)
        t = make_grid(2.0, 0.1)
        with pytest.raises(InvalidArgumentError):
            ProductField(t + 1.0, np.zeros((1, t.size)), np.zeros(1), params)
        with pytest.raises(InvalidArgumentError):
            ProductField(t, np.zeros((2, t.size)), np.zeros(1), params)

    def test_boundary_ratio(self):
        field = single_mode_field(0.0, 8.0)
        assert field.boundary_ratio() <= 1e-10
        zero = field.with_coeffs(np.zeros_like(field.coeffs))
        assert zero.boundary_ratio() == 0.0

    def test_poly_bump_compact_support(self):
        t = make_grid(3.0, 0.01)
        vals = poly_bump(t, 1.5)
        assert vals[0] == 0.0 and vals[-1] == 0.0
        assert np.max(vals) == 1.0


class TestConjugatedApply:
    def test_zero_field(self):
        field = single_mode_field(LAM2, 8.0)
        zero = field.with_coeffs(np.zeros_like(field.coeffs))
        out = conjugated_apply(zero, 8.0)
        assert np.all(out.coeffs == 0.0)

    def test_gaussian_against_symbolic_derivatives(self):
        # oracle: d/dt derivatives of e^{-t^2} computed symbolically
        tau = 8.0
        field = single_mode_field(LAM2, tau)
        t = field.t
        out = conjugated_apply(field, tau)
        exact = (4 * t**2 - 2 + 4 * tau * t + tau**2 - LAM2**2) * np.exp(-(t**2))
        assert np.max(np.abs(out.coeffs[0] - exact)) <= 5e-7  # O(h^4)

    def test_resonant_zero_order_coefficient(self):
        tau, sigma = 9.0, 0.25
        lam = tau - sigma
        assert tau**2 - lam**2 == pytest.approx(sigma * (2 * tau - sigma), rel=1e-14)

    def test_resolution_guard(self):
        field = single_mode_field(LAM2, 8.0, h=0.05)
        with pytest.raises(ResolutionError):
            conjugated_apply(field, 8.0)  # tau*h = 0.4

    def test_support_guard(self):
        field = single_mode_field(LAM2, 8.0, profile=lambda t: gaussian_bump(t, 0, 4.0))
        with pytest.raises(InvalidArgumentError):
            conjugated_apply(field, 8.0)

    def test_linearity(self, rng):
        tau = 9.0
        a = single_mode_field(LAM2, tau, profile=lambda t: gaussian_bump(t, 0.4, 0.8))
        b = single_mode_field(LAM2, tau, profile=lambda t: gaussian_bump(t, -0.3, 0.6))
        combo = a.with_coeffs(2.0 * a.coeffs - 1.5 * b.coeffs)
        lhs = conjugated_apply(combo, tau).coeffs
        rhs = 2.0 * conjugated_apply(a, tau).coeffs - 1.5 * conjugated_apply(b, tau).coeffs
        scale = np.max(np.abs(rhs))
        assert np.max(np.abs(lhs - rhs)) / scale <= 1e-12


class TestSolve:
    def test_zero_right_hand_side(self):
        field = single_mode_field(LAM2, 8.0)
        zero = field.with_coeffs(np.zeros_like(field.coeffs))
        out = solve_conjugated(zero, 8.0)
        assert np.all(out.coeffs == 0.0)

    def test_round_trip_gaussian(self):
        tau = 9.0
        u0 = single_mode_field(LAM2, tau, h=0.01)
        f = conjugated_apply(u0, tau)
        u = solve_conjugated(f, tau)
        err = np.linalg.norm(u.coeffs - u0.coeffs) / np.linalg.norm(u0.coeffs)
        assert err <= 1e-4

    def test_single_mode_against_refined_dense_quadrature(self):
        # oracle: dense direct convolution at 10x resolution
        tau, lam, sigma = 8.0, 2.0, 0.25
        field = single_mode_field(lam, tau, sigma=sigma, h=0.01)
        u = solve_conjugated(field, tau, check_residual=False)
        kernel = MultiplierKernel.closed_form(lam, tau)
        h_fine = 0.001
        pad = np.ceil(20.0 / sigma / h_fine) * h_fine
        s = np.arange(-6.0 - pad, 6.0 + pad + h_fine / 2, h_fine)
        w = np.full(s.size, h_fine)
        w[0] = w[-1] = h_fine / 2
        fs = w * np.exp(-(s**2))
        dense = np.array([kernel(ti - s) @ fs for ti in field.t[::100]])
        assert np.max(np.abs(u.coeffs[0, ::100] - dense)) <= 1e-5

    def test_mode_decoupling(self):
        tau = 9.0
        t = make_grid(6.0, 0.01)
        lams = np.array([0.0, LAM2, 5.0])
        coeffs = np.zeros((3, t.size))
        coeffs[1] = gaussian_bump(t)
        params = CarlemanParams(n=3, tau=tau, sigma=0.25)
        f = ProductField(t, coeffs, lams, params)
        u = solve_conjugated(f, tau)
        assert np.all(u.coeffs[0] == 0.0)
        assert np.all(u.coeffs[2] == 0.0)
        assert np.any(u.coeffs[1] != 0.0)

    def test_linearity(self):
        tau = 9.0
        a = single_mode_field(LAM2, tau, profile=lambda t: gaussian_bump(t, 0.4, 0.8))
        b = single_mode_field(LAM2, tau, profile=lambda t: gaussian_bump(t, -0.3, 0.6))
        combo = a.with_coeffs(2.0 * a.coeffs - 1.5 * b.coeffs)
        lhs = solve_conjugated(combo, tau, check_residual=False).coeffs
        rhs = (
            2.0 * solve_conjugated(a, tau, check_residual=False).coeffs
            - 1.5 * solve_conjugated(b, tau, check_residual=False).coeffs
        )
        assert np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)) <= 1e-12

    def test_reflection_identity_and_negative_tau_round_trip(self):
        tau = 9.0
        u0 = single_mode_field(LAM2, tau, profile=lambda t: gaussian_bump(t, 0.5, 0.7))
        f = conjugated_apply(u0, -tau)
        u = solve_conjugated(f, -tau)
        err = np.linalg.norm(u.coeffs - u0.coeffs) / np.linalg.norm(u0.coeffs)
        assert err <= 1e-4
        # the reduction is exactly: reflect, solve at +tau, reflect back
        direct = solve_conjugated(f.reflected(), tau, check_residual=False).reflected()
        assert np.array_equal(u.coeffs, direct.coeffs)

    def test_inadmissible_tau_rejected(self):
        lam = float(np.sqrt(72.0))
        field = single_mode_field(lam, 8.5)
        with pytest.raises(AdmissibilityError):
            solve_conjugated(field, 8.5)  # dist to sqrt(72) ~ 0.0147 < 0.25

    def test_residual_gate_raises_typed_error(self):
        field = single_mode_field(LAM2, 9.0)
        with pytest.raises(ConvergenceError) as err:
            solve_conjugated(field, 9.0, tol=1e-30)
        assert "residual" in err.value.diagnostics


class TestProductNorms:
    def test_zero_field(self):
        grid = build_grid(3)
        spectrum = sphere_spectrum(3, 3)
        t = make_grid(2.0, 0.05)
        params = CarlemanParams(n=3, tau=8.0, sigma=0.25)
        field = sphere_field(spectrum, 1, t, np.zeros((4, t.size)), params)
        assert product_lp_norm(field, 6.0, grid) == 0.0

    @pytest.mark.parametrize("p", [1.2, 2.0, 6.0])
    def test_separable_indicator_samples(self, p):
        # indicator of [0,1) in t times the constant 1 on the sphere
        grid = build_grid(2)
        h = 0.01
        t = make_grid(3.0, h)
        on = (t >= 0.0) & (t < 1.0 - h / 2)
        samples = on[:, None].astype(float) * np.ones(grid.n_points)
        got = product_lp_norm_samples(samples, p, h, grid)
        assert got == pytest.approx((4 * np.pi) ** (1.0 / p), rel=1e-12)

    def test_parseval_matches_synthesis_path(self, rng):
        spectrum = sphere_spectrum(3, 6)
        band = 4
        grid = build_grid(3 * band)
        t = make_grid(3.0, 0.02)
        n_slots = (band + 1) ** 2
        coeffs = rng.standard_normal(n_slots)[:, None] * gaussian_bump(t, 0.2, 0.5)
        params = CarlemanParams(n=3, tau=8.0, sigma=0.25)
        field = sphere_field(spectrum, band, t, coeffs, params)
        coeff_norm = product_lp_norm(field, 2.0)
        samples = field.coeffs.T @ grid.basis(band)
        sample_norm = product_lp_norm_samples(samples, 2.0, field.h, grid)
        assert coeff_norm == pytest.approx(sample_norm, rel=1e-10)

    def test_p_not_two_needs_grid(self):
        field = single_mode_field(LAM2, 8.0)
        with pytest.raises(InvalidArgumentError):
            product_lp_norm(field, 6.0)

    def test_invalid_p(self):
        field = single_mode_field(LAM2, 8.0)
        with pytest.raises(InvalidArgumentError):
            product_lp_norm(field, 0.5)


class TestFieldIO:
    def test_round_trip_exact(self, tmp_path, rng):
        t = make_grid(2.0, 0.05)
        lams = np.array([0.0, 1.0, np.pi])
        coeffs = rng.standard_normal((3, t.size)) * gaussian_bump(t, 0, 0.4)
        params = CarlemanParams(n=3, tau=8.0, sigma=0.25)
        field = ProductField(t, coeffs, lams, params)
        path = tmp_path / "field.txt"
        export_field(field, path)
        back = import_field(path)
        assert np.array_equal(back.coeffs, field.coeffs)
        assert np.array_equal(back.lambdas, field.lambdas)
        assert back.params == field.params
        # the header stores (half_width, h); nodes rebuild to the last ulp
        assert np.allclose(back.t, field.t, rtol=0, atol=1e-14)

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0 0 1.0\n")
        with pytest.raises(InvalidArgumentError):
            import_field(path)

    def test_mode_layout_matches_harmonics(self):
        spectrum = sphere_spectrum(3, 4)
        t = make_grid(2.0, 0.05)
        params = CarlemanParams(n=3, tau=8.0, sigma=0.25)
        band = 2
        field = sphere_field(spectrum, band, t, np.zeros((9, t.size)), params)
        assert field.lambdas[basis_index(1, 0)] == spectrum.distinct_values[1]
        assert np.array_equal(field.lambdas, mode_lambdas(spectrum, band))

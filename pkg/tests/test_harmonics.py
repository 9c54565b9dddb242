import numpy as np
import pytest

from carleman_lab.errors import InvalidArgumentError
from carleman_lab.harmonics import (
    SphereField,
    analyze,
    basis_degrees,
    basis_index,
    build_grid,
    cluster_degrees,
    estimate_cluster_constants,
    field_from_text,
    field_to_text,
    lp_norm_sphere,
    mode_lambdas,
    project_cluster,
    synthesize,
)
from carleman_lab.spectra import Spectrum

FOUR_PI = 4.0 * np.pi


def unit_field(grid, band, l, m):
    coeffs = np.zeros((band + 1) ** 2)
    coeffs[basis_index(l, m)] = 1.0
    return SphereField(coeffs, band, grid)


class TestGrid:
    def test_constant_band_grid(self):
        grid = build_grid(0)
        assert grid.weights.sum() == pytest.approx(FOUR_PI, rel=1e-12)

    def test_weights_sum_and_positivity(self, grid8):
        assert grid8.weights.sum() == pytest.approx(FOUR_PI, rel=1e-12)
        assert np.all(grid8.weights > 0)

    def test_orthonormality_of_y32(self, grid8):
        y = synthesize(unit_field(grid8, 8, 3, 2))
        assert np.sum(grid8.weights * y * y) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonality_y32_y51(self, grid8):
        y1 = synthesize(unit_field(grid8, 8, 3, 2))
        y2 = synthesize(unit_field(grid8, 8, 5, 1))
        assert abs(np.sum(grid8.weights * y1 * y2)) <= 1e-12

    def test_undersized_grid_rejected(self):
        with pytest.raises(InvalidArgumentError):
            build_grid(8, n_theta=4)


class TestAnalyzeSynthesize:
    def test_single_harmonic_coefficients(self, grid8):
        samples = synthesize(unit_field(grid8, 8, 2, 1))
        field = analyze(grid8, samples)
        expected = np.zeros((9) ** 2)
        expected[basis_index(2, 1)] = 1.0
        assert abs(field.coeffs[basis_index(2, 1)] - 1.0) <= 1e-12
        off = np.delete(field.coeffs, basis_index(2, 1))
        assert np.max(np.abs(off)) <= 1e-12

    def test_constant_function(self, grid8):
        field = analyze(grid8, np.ones(grid8.n_points))
        assert field.coeffs[0] == pytest.approx(np.sqrt(FOUR_PI), abs=1e-12)
        assert np.max(np.abs(field.coeffs[1:])) <= 1e-12

    def test_round_trip_random_field(self, grid8, rng):
        coeffs = rng.standard_normal(81)
        field = SphereField(coeffs, 8, grid8)
        back = analyze(grid8, synthesize(field))
        assert np.max(np.abs(back.coeffs - coeffs)) <= 1e-12

    def test_synthesize_zero_and_y10(self, grid8):
        zero = SphereField(np.zeros(81), 8, grid8)
        assert np.max(np.abs(synthesize(zero))) == 0.0
        y10 = synthesize(unit_field(grid8, 8, 1, 0))
        theta = grid8.nodes[:, 0]
        assert np.max(np.abs(y10 - np.sqrt(3 / FOUR_PI) * np.cos(theta))) <= 1e-12

    def test_linearity(self, grid8, rng):
        f = SphereField(rng.standard_normal(81), 8, grid8)
        g = SphereField(rng.standard_normal(81), 8, grid8)
        lhs = synthesize(f.with_coeffs(2.0 * f.coeffs + 3.0 * g.coeffs))
        rhs = 2.0 * synthesize(f) + 3.0 * synthesize(g)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12

    def test_sample_count_mismatch(self, grid8):
        with pytest.raises(InvalidArgumentError):
            analyze(grid8, np.ones(5))

    def test_band_above_grid_rejected(self, grid8):
        with pytest.raises(InvalidArgumentError):
            analyze(grid8, np.ones(grid8.n_points), band_limit=9)


class TestProjectCluster:
    def test_constant_mode_in_first_window(self, grid8, sphere3_50):
        f = unit_field(grid8, 8, 0, 0)
        out = project_cluster(f, 0, sphere3_50)
        assert np.array_equal(out.coeffs, f.coeffs)

    def test_degree_one_in_second_window(self, grid8, sphere3_50):
        # lambda_1 = sqrt(2) lies in [1, 2)
        f = unit_field(grid8, 8, 1, 0)
        assert np.array_equal(project_cluster(f, 1, sphere3_50).coeffs, f.coeffs)

    def test_disjoint_window_zeroes(self, grid8, sphere3_50):
        f = unit_field(grid8, 8, 1, 0)
        assert np.all(project_cluster(f, 2, sphere3_50).coeffs == 0.0)

    def test_integer_tie_goes_to_lower_window_start(self, grid8):
        values = (0.0, 1.0, 2.0) + tuple(2.0 + 1.1 * j for j in range(1, 7))
        spectrum = Spectrum(values, (1,) * 9)
        f = unit_field(grid8, 8, 2, 0)  # positional lambda = 2.0
        assert np.all(project_cluster(f, 1, spectrum).coeffs == 0.0)
        kept = project_cluster(f, 2, spectrum)
        assert kept.coeffs[basis_index(2, 0)] == 1.0

    def test_truncated_spectrum_rejected(self, grid8):
        spectrum = Spectrum((0.0, 1.4), (1, 3))
        f = unit_field(grid8, 8, 1, 0)
        with pytest.raises(InvalidArgumentError):
            project_cluster(f, 3, spectrum)

    def test_idempotent_and_self_adjoint(self, grid8, sphere3_50, rng):
        f = SphereField(rng.standard_normal(81), 8, grid8)
        g = SphereField(rng.standard_normal(81), 8, grid8)
        for k in range(8):
            pf = project_cluster(f, k, sphere3_50)
            ppf = project_cluster(pf, k, sphere3_50)
            assert np.array_equal(pf.coeffs, ppf.coeffs)
            lhs = float(pf.coeffs @ g.coeffs)
            rhs = float(f.coeffs @ project_cluster(g, k, sphere3_50).coeffs)
            assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_partition_of_identity(self, grid8, sphere3_50, rng):
        f = SphereField(rng.standard_normal(81), 8, grid8)
        total = np.zeros_like(f.coeffs)
        for k in range(10):
            total += project_cluster(f, k, sphere3_50).coeffs
        assert np.array_equal(total, f.coeffs)


class TestLpNorm:
    def test_constant_l2(self, grid8):
        assert lp_norm_sphere(np.ones(grid8.n_points), 2, grid8) == pytest.approx(
            np.sqrt(FOUR_PI), rel=1e-12
        )

    @pytest.mark.parametrize("p", [1.0, 1.2, 2.0, 6.0])
    def test_constant_homogeneity(self, grid8, p):
        c = 2.7
        got = lp_norm_sphere(np.full(grid8.n_points, c), p, grid8)
        assert got == pytest.approx(c * FOUR_PI ** (1.0 / p), rel=1e-12)

    def test_unit_harmonic_l2(self, grid8):
        y = synthesize(unit_field(grid8, 8, 1, 0))
        assert lp_norm_sphere(y, 2, grid8) == pytest.approx(1.0, abs=1e-10)

    def test_p_below_one_rejected(self, grid8):
        with pytest.raises(InvalidArgumentError):
            lp_norm_sphere(np.ones(grid8.n_points), 0.5, grid8)


class TestClusterConstants:
    def test_k0_ratio_closed_form(self):
        # the k=0 window holds only the constant; the best L2 -> L6 ratio
        # is ||Y00||_6 = (4 pi)^(1/6 - 1/2), attained by the constant itself
        est = estimate_cluster_constants(0, 6.0, trials=3, seed=5)
        assert est[0].up4_ratio == pytest.approx(FOUR_PI ** (1 / 6 - 1 / 2), abs=1e-12)

    def test_single_function_cluster_ratio_is_its_norm(self, sphere3_50):
        grid = build_grid(3)
        y00 = synthesize(unit_field(grid, 0, 0, 0))
        expected = lp_norm_sphere(y00, 6.0, grid)
        est = estimate_cluster_constants(0, 6.0, trials=1, seed=0)
        assert est[0].up4_ratio == pytest.approx(expected, rel=1e-12)

    def test_zero_trials_rejected(self):
        with pytest.raises(InvalidArgumentError):
            estimate_cluster_constants(3, 6.0, trials=0, seed=0)

    def test_deterministic_given_seed(self):
        a = estimate_cluster_constants(4, 6.0, trials=2, seed=9)
        b = estimate_cluster_constants(4, 6.0, trials=2, seed=9)
        assert a == b

    def test_holder_chain_and_ordering_small_sweep(self):
        est = estimate_cluster_constants(6, 6.0, trials=3, seed=13)
        assert all(e.holder_violations == 0 for e in est)
        assert all(e.up5_ratio <= e.up4_ratio * (1 + 1e-12) for e in est)


class TestModeLayout:
    def test_mode_lambdas_repeat_by_degree(self, sphere3_50):
        lams = mode_lambdas(sphere3_50, 2)
        expected = [sphere3_50.distinct_values[l] for l in (0, 1, 1, 1, 2, 2, 2, 2, 2)]
        assert np.allclose(lams, expected, rtol=0, atol=0)

    def test_mode_lambdas_needs_enough_values(self):
        with pytest.raises(InvalidArgumentError):
            mode_lambdas(Spectrum((0.0,), (1,)), 2)

    def test_cluster_degrees_on_s2_are_singletons(self, sphere3_50):
        for k in range(1, 12):
            assert cluster_degrees(sphere3_50, k, 15) == [k]

    def test_degrees_arrays(self):
        assert list(basis_degrees(2)) == [0, 1, 1, 1, 2, 2, 2, 2, 2]


class TestFieldText:
    def test_round_trip(self, grid8, rng):
        field = SphereField(rng.standard_normal(81), 8, grid8)
        text = field_to_text(field)
        back = field_from_text(text, 8, grid8)
        assert np.array_equal(back.coeffs, field.coeffs)

    def test_bad_index_rejected(self, grid8):
        with pytest.raises(InvalidArgumentError):
            field_from_text("99999 1.0\n", 2, grid8)

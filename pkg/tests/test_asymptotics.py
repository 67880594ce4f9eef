"""Tests for phi/psi expectations, alpha coefficients and eigenprojection covariances."""
import numpy as np
import pytest

from src.asymptotics import (
    TwoGroupShape,
    alpha_sscm,
    alpha_tyler,
    asymptotic_coefficients,
    chi_square_oracle,
    eigenprojection_covariance,
    invert_phi_map,
    invert_phi_map_grouped,
    phi_map,
    phi_values,
    projection_pair_operator,
    psi_jk,
    psi_table,
    psi_value,
    spherical_shape_covariance,
    two_group_coefficients,
    two_group_phi_psi,
    two_group_spectrum,
)
from src.errors import ConvergenceError, DegenerateSpectrumError, DomainError, InvalidInputError
from src.linalg import Spectrum, TensorMatrix
from src.special import are_hypergeometric


@pytest.fixture
def plane():
    """Lambda = diag(0.8, 0.2), i.e. rho = 1/2 in the plane."""
    return Spectrum.from_groups([0.8, 0.2], [1, 1])


@pytest.fixture
def three_groups():
    return Spectrum.from_groups([0.5, 0.3, 0.2], [1, 1, 1])


class TestPhi:
    """Tests for the eigenvalues of E[theta theta^T]."""

    @pytest.mark.parametrize("d", [2, 3, 7])
    def test_spherical(self, d):
        """Test equal eigenvalues give phi = 1/d for every group."""
        np.testing.assert_allclose(phi_values(np.ones(d), np.ones(d)), np.full(d, 1.0 / d), rtol=1e-10)

    def test_plane(self, plane):
        """Test diag(0.8, 0.2) gives (2/3, 1/3)."""
        np.testing.assert_allclose(phi_map(plane), [2 / 3, 1 / 3], rtol=1e-9)

    def test_scale_invariant(self):
        np.testing.assert_allclose(
            phi_values([4.0, 2.0, 1.0], [1, 2, 1]), phi_values([0.4, 0.2, 0.1], [1, 2, 1]), rtol=1e-10
        )

    def test_unit_trace_and_order(self):
        values, sizes = [5.0, 2.0, 1.0, 0.5], [2, 1, 3, 1]
        phi = phi_values(values, sizes)
        assert np.dot(phi, sizes) == pytest.approx(1.0, abs=1e-10)
        assert np.all(np.diff(phi) < 0)

    @pytest.mark.parametrize("d,d1,rho", [(2, 1, 0.5), (3, 1, 0.2), (5, 3, 0.7), (10, 4, 0.05)])
    def test_matches_hypergeometric_forms(self, d, d1, rho):
        """Test the quadrature agrees with the two-group closed forms."""
        shape = TwoGroupShape(d, d1, rho)
        spectrum = two_group_spectrum(shape)
        phi_closed, psi_closed = two_group_phi_psi(shape)
        np.testing.assert_allclose(phi_map(spectrum), phi_closed, atol=1e-8)
        assert psi_jk(spectrum, 0, 1) == pytest.approx(psi_closed, abs=1e-8)

    @pytest.mark.parametrize("rho", [0.1, 0.3, 0.5, 0.7, 0.9, 1e-4, 1e-6])
    def test_plane_closed_forms(self, rho):
        """Test phi = (1, rho) / (1 + rho) and psi = rho / (2 (1 + rho)^2), down to tiny ratios."""
        spectrum = Spectrum.from_groups([1.0, rho * rho], [1, 1])
        np.testing.assert_allclose(phi_map(spectrum), np.array([1.0, rho]) / (1.0 + rho), rtol=1e-8)
        assert psi_jk(spectrum, 0, 1) == pytest.approx(rho / (2.0 * (1.0 + rho) ** 2), rel=1e-8)

    @pytest.mark.parametrize("d,d1", [(3, 1), (3, 2), (5, 2)])
    def test_tiny_ratio_matches_hypergeometric_forms(self, d, d1):
        shape = TwoGroupShape(d, d1, 1e-6)
        spectrum = two_group_spectrum(shape)
        phi_closed, psi_closed = two_group_phi_psi(shape)
        np.testing.assert_allclose(phi_map(spectrum), phi_closed, rtol=1e-7)
        assert psi_jk(spectrum, 0, 1) == pytest.approx(psi_closed, rel=1e-7)

    def test_non_positive_eigenvalue(self):
        with pytest.raises(DomainError):
            phi_values([1.0, 0.0], [1, 1])

    def test_misaligned_input(self):
        with pytest.raises(InvalidInputError):
            phi_values([1.0, 0.5], [1, 1, 1])


class TestPsi:
    """Tests for the cross moments psi_(j,k)."""

    def test_plane(self, plane):
        assert psi_jk(plane, 0, 1) == pytest.approx(1 / 9, rel=1e-9)

    @pytest.mark.parametrize("d", [2, 3, 6])
    def test_spherical(self, d):
        """Test equal eigenvalues give psi = 1/(d (d+2))."""
        assert psi_value(np.ones(d), np.ones(d), 0, d - 1) == pytest.approx(1.0 / (d * (d + 2)), rel=1e-9)

    def test_table_is_symmetric_with_undefined_diagonal(self, three_groups):
        table = psi_table(three_groups.distinct_values, three_groups.multiplicities)
        assert np.all(np.isnan(np.diag(table)))
        off = ~np.eye(3, dtype=bool)
        np.testing.assert_allclose(table[off], table.T[off])

    def test_diagonal_is_rejected(self, plane):
        with pytest.raises(InvalidInputError):
            psi_jk(plane, 1, 1)

    def test_index_out_of_range(self, plane):
        with pytest.raises(InvalidInputError):
            psi_jk(plane, 0, 2)


class TestAlpha:
    """Tests for the alpha coefficients."""

    def test_tyler_plane(self):
        assert alpha_tyler(0.8, 0.2, 2) == pytest.approx(16 / 9)

    def test_tyler_five_dimensions(self):
        assert alpha_tyler(2.0, 1.0, 5) == pytest.approx(5.6)

    def test_tyler_equal_eigenvalues(self):
        with pytest.raises(DegenerateSpectrumError):
            alpha_tyler(0.5, 0.5, 2)

    def test_sscm_plane(self, plane):
        assert alpha_sscm(plane, 0, 1) == pytest.approx(2.0, rel=1e-8)

    def test_sscm_needs_distinct_groups(self, plane):
        with pytest.raises(InvalidInputError):
            alpha_sscm(plane, 0, 0)

    @pytest.mark.parametrize("values,sizes", [
        ([0.5, 0.3, 0.2], [1, 1, 1]),
        ([3.0, 1.0], [2, 3]),
        ([10.0, 9.0, 1.0], [1, 2, 1]),
    ])
    def test_tyler_never_worse(self, values, sizes):
        """Test alpha_T <= alpha_S for every pair."""
        coefficients = asymptotic_coefficients(Spectrum.from_groups(values, sizes))
        off = ~np.eye(len(values), dtype=bool)
        assert np.all(coefficients.alpha_tyler[off] <= coefficients.alpha_sscm[off] * (1 + 1e-10))

    def test_single_group_rejected(self):
        with pytest.raises(InvalidInputError):
            asymptotic_coefficients(Spectrum.from_groups([1.0], [3]))


class TestTwoGroup:
    """Tests for the two-group shapes."""

    def test_from_gamma(self):
        shape = TwoGroupShape.from_gamma(2, 1, 4.0)
        assert shape.rho == pytest.approx(0.5)
        assert shape.kappa == pytest.approx(0.75)
        assert shape.d2 == 1

    def test_spectrum_has_unit_trace(self):
        spectrum = two_group_spectrum(TwoGroupShape(5, 2, 0.5))
        assert np.dot(spectrum.distinct_values, spectrum.multiplicities) == pytest.approx(1.0)
        assert spectrum.distinct_values[0] / spectrum.distinct_values[1] == pytest.approx(4.0)

    def test_spherical_spectrum_is_one_group(self):
        assert two_group_spectrum(TwoGroupShape(4, 1, 1.0)).multiplicities == (4,)

    def test_closed_forms_at_rho_one(self):
        phi, psi = two_group_phi_psi(TwoGroupShape(4, 1, 1.0))
        np.testing.assert_allclose(phi, [0.25, 0.25])
        assert psi == pytest.approx(1 / 24)

    @pytest.mark.parametrize("d,d1,rho", [(2, 1, 0.5), (5, 2, 0.4), (8, 7, 0.9)])
    def test_are_matches_efficiency(self, d, d1, rho):
        coefficients = two_group_coefficients(TwoGroupShape(d, d1, rho))
        assert coefficients.are(0, 1) == pytest.approx(are_hypergeometric(d, d1, rho), rel=1e-10)

    def test_closed_forms_match_quadrature(self):
        shape = TwoGroupShape(6, 2, 0.3)
        closed = two_group_coefficients(shape)
        numeric = asymptotic_coefficients(two_group_spectrum(shape))
        assert closed.alpha_sscm[0, 1] == pytest.approx(numeric.alpha_sscm[0, 1], rel=1e-7)
        assert closed.alpha_tyler[0, 1] == pytest.approx(numeric.alpha_tyler[0, 1], rel=1e-12)

    def test_rho_one_is_degenerate(self):
        with pytest.raises(DegenerateSpectrumError):
            two_group_coefficients(TwoGroupShape(3, 1, 1.0))

    @pytest.mark.parametrize("d,d1,rho", [(3, 3, 0.5), (3, 1, 0.0), (3, 1, 1.2)])
    def test_invalid_shapes(self, d, d1, rho):
        with pytest.raises((InvalidInputError, DomainError)):
            TwoGroupShape(d, d1, rho)


class TestCovariance:
    """Tests for the eigenprojection covariance operators."""

    def test_pair_operator_is_projection(self, three_groups):
        M = projection_pair_operator(three_groups, 0, 2).entries
        np.testing.assert_allclose(M @ M, M, atol=1e-12)
        np.testing.assert_allclose(M, M.T, atol=1e-12)

    def test_pair_operator_rank(self):
        spectrum = Spectrum.from_groups([3.0, 1.0], [2, 3])
        M = projection_pair_operator(spectrum, 0, 1)
        assert M.rank() == 6
        assert M.trace() == pytest.approx(6.0)

    def test_plane_trace(self, plane):
        """Test trace(V_T) = alpha_T d_1 d_2 in the plane."""
        V = eigenprojection_covariance(plane, 0, "tyler")
        assert V.trace() == pytest.approx(16 / 9)

    @pytest.mark.parametrize("j", [0, 1, 2])
    def test_rank(self, j):
        spectrum = Spectrum.from_groups([0.4, 0.25, 0.1], [1, 2, 1])
        V = eigenprojection_covariance(spectrum, j, "sscm")
        d_j = spectrum.multiplicities[j]
        assert V.rank() == d_j * (4 - d_j)

    def test_tyler_dominates(self, three_groups):
        """Test V_S - V_T is positive semidefinite."""
        V_T = eigenprojection_covariance(three_groups, 1, "tyler").entries
        V_S = eigenprojection_covariance(three_groups, 1, "sscm").entries
        assert np.linalg.eigvalsh(V_S - V_T).min() > -1e-10

    def test_unknown_estimator(self, plane):
        with pytest.raises(InvalidInputError):
            eigenprojection_covariance(plane, 0, "mcd")

    def test_spherical_sscm_annihilates_identity(self):
        V = spherical_shape_covariance(3, "sscm").entries
        np.testing.assert_allclose(V @ np.eye(3).reshape(-1), np.zeros(9), atol=1e-14)
        assert np.trace(V) == pytest.approx(10 / 15)

    def test_spherical_tyler_is_affine_case(self):
        tyler = spherical_shape_covariance(4, "tyler").entries
        affine = spherical_shape_covariance(4, "affine", sigma1=1.5).entries
        np.testing.assert_allclose(tyler, affine)

    def test_spherical_affine_needs_sigma1(self):
        with pytest.raises(InvalidInputError):
            spherical_shape_covariance(3, "affine")

    def test_returns_tensor_matrix(self, plane):
        assert isinstance(eigenprojection_covariance(plane, 1, "sscm"), TensorMatrix)

    @pytest.mark.parametrize("seed", range(8))
    def test_random_spectra(self, seed):
        """Two and three groups in d <= 6 with a random eigenbasis."""
        rng = np.random.default_rng(seed)
        m = 2 + seed % 2
        d = int(rng.integers(m, 7))
        cuts = np.sort(rng.choice(np.arange(1, d), size=m - 1, replace=False))
        sizes = np.diff(np.concatenate([[0], cuts, [d]])).astype(int)
        values = np.cumsum(rng.uniform(0.2, 1.0, m))[::-1]
        basis, _ = np.linalg.qr(rng.standard_normal((d, d)))
        spectrum = Spectrum.from_groups(values, sizes, basis=basis)
        coefficients = asymptotic_coefficients(spectrum)
        for j in range(m):
            for k in range(m):
                if k != j:
                    M = projection_pair_operator(spectrum, j, k).entries
                    np.testing.assert_allclose(M @ M, M, atol=1e-10)
            for estimator, table in (("tyler", coefficients.alpha_tyler), ("sscm", coefficients.alpha_sscm)):
                V = eigenprojection_covariance(spectrum, j, estimator)
                assert V.rank() == sizes[j] * (d - sizes[j])
                expected = sum(table[j, k] * sizes[j] * sizes[k] for k in range(m) if k != j)
                assert V.trace() == pytest.approx(expected, rel=1e-8)


class TestInversion:
    """Tests for inverting the map from eigenvalues to phi."""

    def test_plane(self):
        np.testing.assert_allclose(invert_phi_map([2 / 3, 1 / 3]), [0.8, 0.2], atol=1e-8)

    def test_round_trip(self):
        lam = np.array([0.5, 0.3, 0.15, 0.05])
        phi = phi_values(lam, np.ones(4))
        np.testing.assert_allclose(invert_phi_map(phi), lam, atol=1e-8)

    def test_grouped_round_trip(self):
        lam = np.array([0.3, 0.1, 0.05])
        sizes = [2, 3, 2]
        lam = lam / np.dot(lam, sizes)
        phi = phi_values(lam, sizes)
        np.testing.assert_allclose(invert_phi_map_grouped(phi, sizes), lam, atol=1e-8)

    def test_spherical_is_fixed_point(self):
        np.testing.assert_allclose(invert_phi_map(np.full(3, 1 / 3)), np.full(3, 1 / 3))

    def test_rejects_ascending(self):
        with pytest.raises(InvalidInputError):
            invert_phi_map([0.2, 0.8])

    def test_rejects_wrong_trace(self):
        with pytest.raises(InvalidInputError):
            invert_phi_map([0.6, 0.5])

    def test_iteration_budget(self):
        with pytest.raises(ConvergenceError) as excinfo:
            invert_phi_map([0.9, 0.1], max_iter=1)
        assert excinfo.value.iterations == 1


@pytest.mark.slow
class TestOracle:
    """Tests of the quadrature against direct chi-square simulation."""

    def test_agrees_with_quadrature(self):
        values, sizes = [0.5, 0.3, 0.2], [1, 2, 1]
        oracle = chi_square_oracle(values, sizes, n_draws=2_000_000, master_seed=7, chunk=500_000)
        phi = phi_values(values, sizes)
        psi = psi_table(values, sizes)
        assert oracle.draws == 2_000_000
        np.testing.assert_array_less(np.abs(oracle.phi - phi), 5 * oracle.phi_se + 1e-6)
        off = ~np.eye(3, dtype=bool)
        assert np.all(np.abs(oracle.psi[off] - psi[off]) < 5 * oracle.psi_se[off] + 1e-6)

    def test_reproducible(self):
        first = chi_square_oracle([2.0, 1.0], [1, 1], n_draws=10_000, master_seed=3, chunk=3_000)
        second = chi_square_oracle([2.0, 1.0], [1, 1], n_draws=10_000, master_seed=3, chunk=3_000)
        np.testing.assert_array_equal(first.phi, second.phi)

    @pytest.mark.parametrize("d,d1", [(3, 1), (3, 2), (5, 2), (5, 3)])
    @pytest.mark.parametrize("rho", [0.1, 0.5, 0.9])
    def test_two_group_grid(self, d, d1, rho):
        spectrum = two_group_spectrum(TwoGroupShape(d, d1, rho))
        values, sizes = spectrum.distinct_values, spectrum.multiplicities
        oracle = chi_square_oracle(values, sizes, n_draws=10_000_000, master_seed=d * 100 + d1, chunk=1_000_000)
        phi = phi_values(values, sizes)
        psi = psi_value(values, sizes, 0, 1)
        np.testing.assert_array_less(np.abs(oracle.phi - phi), 4 * oracle.phi_se + 1e-12)
        assert abs(oracle.psi[0, 1] - psi) < 4 * oracle.psi_se[0, 1] + 1e-12

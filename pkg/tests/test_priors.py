import numpy as np
import pytest
from scipy.linalg import expm, fractional_matrix_power

from graphsmooth import (
    PriorSpec,
    c_prior_logdensity,
    eig,
    laplacian,
    make_path,
    make_ring,
    precision_eigenvalues,
    rkhs_norm_sq,
    sample_c,
    sample_prior,
)
from conftest import dense_prior_covariance, random_connected_graph


class _ZeroRng:
    """Stands in for a Generator whose normal draws are all zero."""

    def standard_normal(self, n):
        return np.zeros(n)


class TestPriorSpec:
    def test_power_requires_alpha(self):
        with pytest.raises(ValueError):
            PriorSpec(kind="power", r=1.0)

    def test_power_alpha_positive(self):
        with pytest.raises(ValueError):
            PriorSpec.power(alpha=-1.0, r=1.0)

    def test_exponential_rejects_alpha(self):
        with pytest.raises(ValueError):
            PriorSpec(kind="exponential", r=1.0, alpha=2.0)

    def test_r_at_least_one(self):
        with pytest.raises(ValueError):
            PriorSpec.power(alpha=1.0, r=0.5)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            PriorSpec(kind="cauchy", r=1.0)


class TestPrecisionEigenvalues:
    def test_power_plugin_value(self):
        # alpha=1, r=1, n=2, c=1, lambda_0=0: ((n/c)^2 * n^-2)^(3/2) = 1
        s = eig(make_path(2))
        cg = precision_eigenvalues(PriorSpec.power(alpha=1.0, r=1.0), s, c=1.0)
        np.testing.assert_allclose(cg.mu[0], 1.0, rtol=1e-12)

    def test_exponential_zero_mode(self):
        s = eig(make_ring(8))
        cg = precision_eigenvalues(PriorSpec.exponential(r=1.0), s, c=0.7)
        np.testing.assert_allclose(cg.mu[0], 1.0 / 8, rtol=1e-12)
        np.testing.assert_allclose(cg.coefficient_variances[0], 1.0, rtol=1e-12)

    def test_c_must_be_positive(self):
        s = eig(make_path(4))
        with pytest.raises(ValueError):
            precision_eigenvalues(PriorSpec.exponential(r=1.0), s, c=0.0)

    def test_mu_increasing_in_lambda(self, rng):
        s = eig(random_connected_graph(rng, 12))
        for spec in (PriorSpec.power(alpha=1.5, r=1.2), PriorSpec.exponential(r=1.2)):
            mu = precision_eigenvalues(spec, s, c=0.8).mu
            order = np.argsort(s.eigenvalues)
            assert np.all(np.diff(mu[order]) >= -1e-12)

    def test_power_covariance_matches_matrix_power_oracle(self):
        g = make_path(5)
        s = eig(g)
        spec = PriorSpec.power(alpha=1.0, r=1.0)
        c = 0.9
        n = g.n
        precision = fractional_matrix_power(
            (n / c) ** 2 * (laplacian(g) + np.eye(n) / n**2), spec.alpha + spec.r / 2
        )
        np.testing.assert_allclose(dense_prior_covariance(spec, s, c),
                                   np.linalg.inv(precision), atol=1e-10)

    def test_exponential_covariance_matches_expm_oracle(self):
        g = make_ring(7)
        s = eig(g)
        spec = PriorSpec.exponential(r=1.4)
        c = 1.3
        n = g.n
        oracle = n * expm(-((n / c) ** (2 / 1.4)) * laplacian(g))
        np.testing.assert_allclose(dense_prior_covariance(spec, s, c), oracle,
                                   atol=1e-9)


class TestSamplePrior:
    def test_zero_draws_give_zero_function(self):
        s = eig(make_path(6))
        cg = precision_eigenvalues(PriorSpec.power(alpha=1.0, r=1.0), s, c=1.0)
        np.testing.assert_array_equal(sample_prior(cg, s, _ZeroRng()), np.zeros(6))

    def test_deterministic_given_seed(self):
        s = eig(make_ring(9))
        cg = precision_eigenvalues(PriorSpec.exponential(r=1.0), s, c=2.0)
        a = sample_prior(cg, s, np.random.default_rng(7))
        b = sample_prior(cg, s, np.random.default_rng(7))
        np.testing.assert_array_equal(a, b)

    def test_coefficient_variances_match(self):
        s = eig(make_path(10))
        cg = precision_eigenvalues(PriorSpec.power(alpha=1.0, r=1.0), s, c=1.5)
        rng = np.random.default_rng(123)
        draws = np.array([sample_prior(cg, s, rng) for _ in range(10_000)])
        coeffs = draws @ s.basis / s.n
        emp_var = coeffs.var(axis=0, ddof=1)
        target = cg.coefficient_variances
        se = target * np.sqrt(2.0 / (draws.shape[0] - 1))
        assert np.all(np.abs(emp_var - target) <= 5 * se)

    def test_empirical_covariance_matches_dense(self):
        g = make_path(5)
        s = eig(g)
        spec = PriorSpec.power(alpha=1.0, r=1.0)
        cg = precision_eigenvalues(spec, s, c=1.0)
        rng = np.random.default_rng(99)
        draws = np.array([sample_prior(cg, s, rng) for _ in range(40_000)])
        emp = np.cov(draws.T)
        cov = dense_prior_covariance(spec, s, 1.0)
        se = np.sqrt((np.outer(np.diag(cov), np.diag(cov)) + cov**2) / draws.shape[0])
        assert np.all(np.abs(emp - cov) <= 5 * se)


class TestDrawSmoothness:
    def test_power_prior_draw_regularity_diagnostic(self, capsys):
        # diagnostic, not an assertion on the contraction theory: draws from
        # the power prior should typically carry moderate smoothness norms
        # at beta below alpha and much larger ones above it
        from graphsmooth import sobolev_norm_sq

        s = eig(make_path(200))
        alpha = 2.0
        cg = precision_eigenvalues(PriorSpec.power(alpha=alpha, r=1.0), s, c=1.0)
        rng = np.random.default_rng(55)
        draws = [sample_prior(cg, s, rng) for _ in range(100)]
        below = np.median([sobolev_norm_sq(s, f, alpha - 0.75, 1.0) for f in draws])
        above = np.median([sobolev_norm_sq(s, f, alpha + 0.75, 1.0) for f in draws])
        print(f"median smoothness norm: beta<alpha {below:.3g}, beta>alpha {above:.3g}")
        assert 0 < below < above


class TestScaleHyperprior:
    def test_mc_mean(self):
        rng = np.random.default_rng(2024)
        draws = np.array([sample_c(rng) for _ in range(100_000)])
        assert abs(draws.mean() - 1.0) <= 5 / np.sqrt(draws.size)

    def test_logdensity_values(self):
        assert c_prior_logdensity(1.0) == -1.0
        assert c_prior_logdensity(-1.0) == float("-inf")
        assert c_prior_logdensity(0.0) == float("-inf")


class TestRkhsNorm:
    def test_basis_elements_have_unit_norm(self):
        # c ~ n keeps the precision eigenvalues within a few decades, so the
        # roundoff in <psi_i, psi_j>_n is not amplified past the tolerance
        s = eig(make_ring(6))
        cg = precision_eigenvalues(PriorSpec.exponential(r=1.0), s, c=6.0)
        for j in (0, 2, 5):
            h = s.basis[:, j] / np.sqrt(s.n * cg.mu[j])
            np.testing.assert_allclose(rkhs_norm_sq(cg, s, h), 1.0, rtol=1e-9)

    def test_zero_function(self):
        s = eig(make_path(4))
        cg = precision_eigenvalues(PriorSpec.power(alpha=2.0, r=1.0), s, c=1.0)
        assert rkhs_norm_sq(cg, s, np.zeros(4)) == 0.0

    @pytest.mark.parametrize("spec,c", [(PriorSpec.power(alpha=1.0, r=1.0), 1.1),
                                        (PriorSpec.exponential(r=1.0), 4.0)])
    def test_matches_dense_inverse_oracle(self, spec, c, rng):
        s = eig(make_path(4))
        cg = precision_eigenvalues(spec, s, c)
        h = rng.standard_normal(4)
        oracle = h @ np.linalg.inv(dense_prior_covariance(spec, s, c)) @ h
        np.testing.assert_allclose(rkhs_norm_sq(cg, s, h), oracle, rtol=1e-8)

    def test_dimension_mismatch(self):
        s = eig(make_path(4))
        cg = precision_eigenvalues(PriorSpec.power(alpha=1.0, r=1.0), s, c=1.0)
        with pytest.raises(ValueError):
            rkhs_norm_sq(cg, s, np.ones(5))

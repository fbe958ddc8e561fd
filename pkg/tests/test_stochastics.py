"""NIG margins and the copula sampler against quadrature and scipy oracles."""

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import kstest, norminvgauss

from hedgelab.jivr import default_params
from hedgelab.stochastics import (CopulaSpec, GaussianCopula, NigDistribution,
                                  NigParams, copula_sample,
                                  gaussian_rank_correlation, load_key_value_params)
from hedgelab.volsurface import DomainError

SP500 = NigParams(zeta=-0.641306, varphi=2.039669)
ALL_MARGINS = [SP500, NigParams(0.143760, 1.351070), NigParams(0.852943, 1.538928),
               NigParams(0.029109, 2.284780), NigParams(-0.159051, 1.449977),
               NigParams(0.092664, 1.428477)]


class TestDensity:
    def test_sp500_margin_mass_on_narrow_window(self):
        # the equity margin decays fast enough for the +-12 window alone
        dist = NigDistribution(SP500)
        mass, _ = quad(dist.pdf, -12, 12, limit=300)
        assert mass == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("params", ALL_MARGINS, ids=lambda p: f"z{p.zeta}")
    def test_normalization_mean_variance(self, params):
        # slower-decaying skewed margins need wider integration windows
        dist = NigDistribution(params)
        mass, _ = quad(dist.pdf, -40, 40, limit=500)
        mean, _ = quad(lambda x: x * dist.pdf(x), -40, 40, limit=500)
        var, _ = quad(lambda x: x * x * dist.pdf(x), -60, 60, limit=600)
        assert mass == pytest.approx(1.0, abs=1e-6)
        assert mean == pytest.approx(0.0, abs=1e-6)
        assert var == pytest.approx(1.0, abs=1e-5)

    def test_matches_scipy_parameterization(self):
        # independent oracle: scipy's norminvgauss with the translated parameters
        dist = NigDistribution(SP500)
        a = dist.alpha * dist.delta
        b = dist.beta * dist.delta
        xs = np.linspace(-6, 6, 41)
        ours = dist.pdf(xs)
        ref = norminvgauss.pdf(xs, a, b, loc=dist.mu, scale=dist.delta)
        np.testing.assert_allclose(ours, ref, rtol=1e-10)

    def test_symmetric_when_zeta_zero(self):
        dist = NigDistribution(NigParams(zeta=0.0, varphi=1.7))
        xs = np.linspace(0.1, 8, 25)
        np.testing.assert_allclose(dist.pdf(xs), dist.pdf(-xs), rtol=1e-12)

    def test_invalid_params(self):
        with pytest.raises(DomainError):
            NigParams(zeta=0.1, varphi=0.0)


class TestCgf:
    def test_zero_at_zero(self):
        assert NigDistribution(SP500).cgf(0.0) == 0.0

    def test_unit_curvature(self):
        dist = NigDistribution(SP500)
        h = 1e-5
        second = (dist.cgf(h) - 2 * dist.cgf(0.0) + dist.cgf(-h)) / (h * h)
        assert second == pytest.approx(1.0, abs=1e-6)

    def test_zero_slope(self):
        dist = NigDistribution(SP500)
        h = 1e-6
        first = (dist.cgf(h) - dist.cgf(-h)) / (2 * h)
        assert first == pytest.approx(0.0, abs=1e-6)

    @pytest.mark.parametrize("u", [-0.5, 0.25, 0.5])
    def test_matches_quadrature_mgf(self, u):
        dist = NigDistribution(SP500)
        mgf, _ = quad(lambda x: np.exp(u * x) * dist.pdf(x), -30, 30, limit=400)
        assert dist.cgf(u) == pytest.approx(np.log(mgf), abs=1e-6)

    def test_convergence_strip(self):
        dist = NigDistribution(SP500)
        with pytest.raises(DomainError):
            dist.cgf(dist.alpha - dist.beta + 0.01)
        with pytest.raises(DomainError):
            dist.cgf(-(dist.alpha + dist.beta) - 0.01)


class TestSampling:
    def test_moments_sp500(self):
        dist = NigDistribution(SP500)
        rng = np.random.default_rng(7)
        draws = dist.sample(rng, size=1_000_000)
        assert abs(draws.mean()) < 0.005
        assert draws.var() == pytest.approx(1.0, abs=0.01)

    def test_ks_against_quadrature_cdf(self):
        dist = NigDistribution(SP500)
        rng = np.random.default_rng(11)
        draws = dist.sample(rng, size=100_000)
        stat = kstest(draws, dist.cdf).statistic
        assert stat < 0.01

    def test_bounded_draws_all_margins(self):
        # sanity bound over a long run of all six model margins
        for params in ALL_MARGINS:
            rng = np.random.default_rng(3)
            draws = NigDistribution(params).sample(rng, size=1_000_000)
            assert np.all(np.abs(draws) < 50.0)


class TestInverseCdf:
    @pytest.mark.parametrize("p", [0.001, 0.01, 0.5, 0.99, 0.999])
    def test_roundtrip(self, p):
        dist = NigDistribution(SP500)
        assert dist.cdf(dist.ppf(p)) == pytest.approx(p, abs=1e-8)

    def test_against_quadrature_cdf(self):
        dist = NigDistribution(NigParams(0.852943, 1.538928))
        for p in (0.05, 0.5, 0.95):
            x = dist.ppf(p)
            assert dist.cdf_quad(x) == pytest.approx(p, abs=1e-6)

    def test_rejects_boundary(self):
        dist = NigDistribution(SP500)
        with pytest.raises(DomainError):
            dist.ppf(0.0)


class TestCopula:
    def test_identity_correlation(self):
        spec = CopulaSpec(np.eye(6))
        rng = np.random.default_rng(5)
        draws = copula_sample(spec, ALL_MARGINS, rng, n=100_000)
        corr = np.corrcoef(draws.T)
        off = corr[~np.eye(6, dtype=bool)]
        assert np.all(np.abs(off) < 0.02)

    def test_model_rank_correlation(self):
        params = default_params()
        rng = np.random.default_rng(17)
        draws = copula_sample(params.copula, [params.nig_r, *params.nig], rng, n=100_000)
        got = gaussian_rank_correlation(draws[:, 0], draws[:, 1])
        assert got == pytest.approx(-0.550, abs=0.02)

    def test_margins_preserved(self):
        params = default_params()
        rng = np.random.default_rng(23)
        draws = copula_sample(params.copula, [params.nig_r, *params.nig], rng, n=100_000)
        for i, margin in enumerate([params.nig_r, *params.nig]):
            dist = NigDistribution(margin)
            assert kstest(draws[:, i], dist.cdf).statistic < 0.01

    def test_seed_reproducibility(self):
        params = default_params()
        a = copula_sample(params.copula, [params.nig_r, *params.nig],
                          np.random.default_rng(99), n=1000)
        b = copula_sample(params.copula, [params.nig_r, *params.nig],
                          np.random.default_rng(99), n=1000)
        assert np.array_equal(a, b)

    def test_bad_matrices_rejected(self):
        with pytest.raises(DomainError):
            CopulaSpec(np.eye(5))
        lop = np.eye(6)
        lop[0, 1] = 0.5
        with pytest.raises(DomainError):
            CopulaSpec(lop)
        singular = np.ones((6, 6)) * 0.999
        np.fill_diagonal(singular, 1.0)
        singular[0, 1] = singular[1, 0] = -0.999
        with pytest.raises(DomainError):
            GaussianCopula(CopulaSpec(singular), ALL_MARGINS)


class TestParamFile:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "params.txt"
        path.write_text("# comment\nlambda = 2.5\nzeta_r = -0.6  # inline\n\nsigma_2 = 0.4\n")
        got = load_key_value_params(path)
        assert got == {"lambda": 2.5, "zeta_r": -0.6, "sigma_2": 0.4}

    def test_bad_line(self, tmp_path):
        path = tmp_path / "params.txt"
        path.write_text("lambda 2.5\n")
        with pytest.raises(ValueError):
            load_key_value_params(path)

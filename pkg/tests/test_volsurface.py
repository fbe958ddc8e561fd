"""Surface evaluation and Black-Scholes analytics against independent oracles."""

import numpy as np
import pytest
from scipy.integrate import quad

from hedgelab.volsurface import (DomainError, OptionQuote, SurfaceCoefficients,
                                 T_MAX, T_MIN, VOL_FLOOR, bs_delta, bs_gamma,
                                 bs_price, leland_vol, moneyness, surface_vol)

R, Q = 0.0266, 0.0177


def bs_price_quadrature(spot, strike, tau, rate, dividend, vol, kind="call"):
    """Slow oracle: discounted payoff integral under the lognormal density.

    Integrates only over the payoff's support, so the kink never sits inside
    a quadrature panel; the upper bound allows for the exp(x) tail shift.
    """
    mu = np.log(spot) + (rate - dividend - 0.5 * vol * vol) * tau
    sd = vol * np.sqrt(tau)

    def integrand(x):
        s = np.exp(x)
        pay = s - strike if kind == "call" else strike - s
        return pay * np.exp(-0.5 * ((x - mu) / sd) ** 2) / (sd * np.sqrt(2 * np.pi))

    if kind == "call":
        lo, hi = np.log(strike), mu + sd * sd + 14 * sd
    else:
        lo, hi = mu - 14 * sd, np.log(strike)
    if lo >= hi:
        return 0.0
    val, _ = quad(integrand, lo, hi, limit=400)
    return np.exp(-rate * tau) * val


GRID = [(m, v, t) for m in (0.8, 0.9, 1.0, 1.1, 1.25)
        for v in (0.1, 0.2, 0.35, 0.5, 0.8)
        for t in (0.05, 0.25, 1.0)]


class TestMoneyness:
    def test_atm_forward_is_zero(self):
        assert moneyness(100.0, 100.0, 0.03, 0.03, 0.25) == pytest.approx(0.0, abs=1e-15)

    def test_scratch_value(self):
        # frozen from a one-line scratch evaluation of the definition
        got = moneyness(100.0, 95.0, R, Q, 63 / 252)
        assert got == pytest.approx(0.10703658877510103, abs=1e-12)

    def test_one_year_atm_strike(self):
        assert moneyness(100.0, 100.0, R, Q, 1.0) == pytest.approx(0.0089, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            moneyness(100.0, 100.0, R, Q, 0.0)
        with pytest.raises(DomainError):
            moneyness(-1.0, 100.0, R, Q, 0.5)


class TestSurfaceVol:
    def test_level_only(self):
        coeffs = SurfaceCoefficients(0.2, 0.0, 0.0, 0.0, 0.0)
        for m, tau in [(0.0, 0.1), (-1.2, 0.5), (2.0, 3.0)]:
            assert surface_vol(coeffs, m, tau) == pytest.approx(0.2, abs=1e-15)

    def test_atm_kills_moneyness_terms(self):
        coeffs = SurfaceCoefficients(0.2, 0.05, 0.1, 0.1, 0.1)
        got = surface_vol(coeffs, 0.0, 0.25)
        assert got == pytest.approx(0.2 + 0.05 * np.exp(-1.0), abs=1e-12)

    def test_scratch_value_negative_moneyness(self):
        # raw formula value frozen from an independent scratch script
        coeffs = SurfaceCoefficients(0.2, 0.05, 0.05, 0.02, 0.02)
        got = surface_vol(coeffs, -0.5, 0.25)
        assert got == pytest.approx(0.1241705624910655, abs=1e-12)

    def test_negative_formula_value_hits_floor(self):
        # same scratch evaluation gives -0.18340550218995955 before flooring
        coeffs = SurfaceCoefficients(0.2, 0.05, 0.1, 0.1, 0.1)
        assert surface_vol(coeffs, -0.5, 0.25) == VOL_FLOOR

    def test_continuity_at_zero_moneyness(self):
        coeffs = SurfaceCoefficients(0.22, -0.03, 0.12, 0.05, -0.04)
        eps = 1e-13
        left = surface_vol(coeffs, -eps, 0.5)
        right = surface_vol(coeffs, eps, 0.5)
        assert abs(left - right) < 1e-12

    def test_tmax_kills_term_structure_terms(self):
        coeffs = SurfaceCoefficients(0.2, 0.0, 0.0, 0.3, 0.4)
        got = surface_vol(coeffs, -0.7, T_MAX)
        assert got == pytest.approx(0.2, abs=1e-14)

    def test_tenor_clamping(self):
        coeffs = SurfaceCoefficients(0.2, 0.05, 0.0, 0.0, 0.0)
        assert surface_vol(coeffs, 0.0, 1 / 252) == surface_vol(coeffs, 0.0, T_MIN)
        assert surface_vol(coeffs, 0.0, 9.0) == surface_vol(coeffs, 0.0, T_MAX)

    def test_extreme_moneyness_is_finite(self):
        coeffs = SurfaceCoefficients(0.2, 0.05, 0.1, 0.1, 0.1)
        for m in (-80.0, -5.0, 5.0, 80.0):
            assert np.isfinite(surface_vol(coeffs, m, 0.25))

    def test_nonfinite_coefficients_rejected(self):
        with pytest.raises(DomainError):
            SurfaceCoefficients(np.nan, 0.0, 0.0, 0.0, 0.0)


class TestBlackScholes:
    def test_benchmark_value(self):
        quote = OptionQuote(100.0, 100.0, 1.0, 0.0, 0.0, 0.2)
        assert bs_price(quote, "call") == pytest.approx(7.965567456359036, abs=1e-4)

    def test_intrinsic_at_expiry(self):
        assert bs_price(OptionQuote(110.0, 100.0, 0.0, R, Q, 0.2), "call") == 10.0
        assert bs_price(OptionQuote(90.0, 100.0, 0.0, R, Q, 0.2), "put") == 10.0

    def test_price_grid_vs_quadrature(self):
        for mny, vol, tau in GRID:
            quote = OptionQuote(100.0, 100.0 * mny, tau, R, Q, vol)
            for kind in ("call", "put"):
                oracle = bs_price_quadrature(100.0, 100.0 * mny, tau, R, Q, vol, kind)
                assert bs_price(quote, kind) == pytest.approx(oracle, abs=1e-4)

    def test_put_call_parity_grid(self):
        for mny, vol, tau in GRID:
            quote = OptionQuote(100.0, 100.0 * mny, tau, R, Q, vol)
            lhs = bs_price(quote, "call") - bs_price(quote, "put")
            rhs = 100.0 * np.exp(-Q * tau) - 100.0 * mny * np.exp(-R * tau)
            assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_deep_itm_delta(self):
        quote = OptionQuote(200.0, 100.0, 0.1, 0.0, 0.0, 0.2)
        assert bs_delta(quote, "call") == pytest.approx(1.0, abs=1e-6)

    def test_put_delta_offset(self):
        quote = OptionQuote(100.0, 105.0, 0.5, R, Q, 0.25)
        assert bs_delta(quote, "put") == pytest.approx(
            bs_delta(quote, "call") - np.exp(-Q * 0.5), abs=1e-14)

    def test_gamma_call_put_identical(self):
        quote = OptionQuote(95.0, 105.0, 0.5, R, Q, 0.3)
        assert bs_gamma(quote) == bs_gamma(quote)

    def test_greeks_vs_finite_differences(self):
        h = 1e-3
        for mny, vol, tau in GRID:
            strike = 100.0 * mny
            kw = dict(strike=strike, tau=tau, rate=R, dividend=Q, vol=vol)
            for kind in ("call", "put"):
                fd_delta = (bs_price(spot=100.0 + h, kind=kind, **kw)
                            - bs_price(spot=100.0 - h, kind=kind, **kw)) / (2 * h)
                assert bs_delta(spot=100.0, kind=kind, **kw) == pytest.approx(
                    fd_delta, abs=1e-5)
            fd_gamma = (bs_price(spot=100.0 + h, kind="call", **kw)
                        - 2 * bs_price(spot=100.0, kind="call", **kw)
                        + bs_price(spot=100.0 - h, kind="call", **kw)) / (h * h)
            assert bs_gamma(spot=100.0, **kw) == pytest.approx(fd_gamma, abs=1e-5)

    def test_greeks_undefined_at_expiry(self):
        quote = OptionQuote(100.0, 100.0, 0.0, R, Q, 0.2)
        with pytest.raises(DomainError):
            bs_delta(quote, "call")
        with pytest.raises(DomainError):
            bs_gamma(quote)

    def test_vectorized_matches_scalar(self):
        spots = np.array([90.0, 100.0, 115.0])
        got = bs_price(spot=spots, strike=100.0, tau=0.3, rate=R, dividend=Q,
                       vol=0.2, kind="call")
        for s, v in zip(spots, got):
            assert v == bs_price(OptionQuote(s, 100.0, 0.3, R, Q, 0.2), "call")


class TestLeland:
    def test_zero_cost_identity(self):
        assert leland_vol(0.2, 0.0, 1 / 252) == pytest.approx(0.2, abs=1e-15)

    def test_scratch_value(self):
        got = leland_vol(0.2, 0.0005, 1 / 252)
        assert got == pytest.approx(0.2062357993835863, abs=1e-12)

    def test_monotone_in_kappa(self):
        vols = [leland_vol(0.2, k, 1 / 252) for k in (0.0, 1e-4, 5e-4, 2e-3, 1e-2)]
        assert all(b > a for a, b in zip(vols, vols[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            leland_vol(0.0, 0.001, 1 / 252)
        with pytest.raises(DomainError):
            leland_vol(0.2, -0.1, 1 / 252)
        with pytest.raises(DomainError):
            leland_vol(0.2, 0.001, 0.0)

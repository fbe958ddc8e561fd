"""Five-factor implied-volatility surface and Black-Scholes analytics.

The surface maps (moneyness, tenor) to an annualized volatility through five
factor loadings: long-term ATM level, time-to-maturity slope, moneyness slope,
smile attenuation, and smirk.  All pricing and practitioner Greeks used by the
hedging instruments and the benchmark strategies live here.  Everything is
vectorized over numpy arrays and free of shared mutable state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

# Tenor band of the surface parameterization, in years.
T_MAX = 5.0
T_MIN = 6.0 / 252.0
T_CONV = 0.25

# Black-Scholes vols below this are floored before pricing; extreme factor
# draws can push the linear surface negative.
VOL_FLOOR = 1e-4

DAYS_PER_YEAR = 252.0


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


@dataclass(frozen=True)
class SurfaceCoefficients:
    """Factor loadings of one surface snapshot (beta1 in annualized-vol units)."""

    beta1: float
    beta2: float
    beta3: float
    beta4: float
    beta5: float

    def __post_init__(self):
        vals = (self.beta1, self.beta2, self.beta3, self.beta4, self.beta5)
        if not all(np.isfinite(v) for v in vals):
            raise DomainError(f"non-finite surface coefficients: {vals}")

    def as_array(self) -> np.ndarray:
        return np.array([self.beta1, self.beta2, self.beta3, self.beta4, self.beta5])


@dataclass(frozen=True)
class OptionQuote:
    """Inputs of one Black-Scholes evaluation."""

    spot: float
    strike: float
    tau: float          # years to maturity
    rate: float         # annualized cc risk-free rate
    dividend: float     # annualized cc dividend yield
    vol: float          # annualized volatility

    def __post_init__(self):
        if self.spot <= 0 or self.strike <= 0:
            raise DomainError(f"spot and strike must be positive: S={self.spot}, K={self.strike}")
        if self.tau < 0:
            raise DomainError(f"negative time to maturity: {self.tau}")
        if self.vol < 0:
            raise DomainError(f"negative volatility: {self.vol}")


def moneyness(spot, strike, rate, dividend, tau):
    """Forward log-moneyness scaled by 1/sqrt(tau)."""
    spot = np.asarray(spot, dtype=float)
    strike = np.asarray(strike, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0):
        raise DomainError("moneyness requires tau > 0")
    if np.any(spot <= 0) or np.any(strike <= 0):
        raise DomainError("moneyness requires positive spot and strike")
    fwd = spot * np.exp((rate - dividend) * tau)
    return np.log(fwd / strike) / np.sqrt(tau)


def surface_vol(coeffs, m, tau):
    """Annualized volatility at moneyness ``m`` and tenor ``tau``.

    ``coeffs`` is a SurfaceCoefficients or an array whose last axis holds the
    five loadings.  Tenors are clamped to [T_MIN, T_MAX] before evaluation and
    the result is floored at VOL_FLOOR.
    """
    if isinstance(coeffs, SurfaceCoefficients):
        beta = coeffs.as_array()
    else:
        beta = np.asarray(coeffs, dtype=float)
    m = np.asarray(m, dtype=float)
    tau = np.clip(np.asarray(tau, dtype=float), T_MIN, T_MAX)

    f2 = np.exp(-np.sqrt(tau / T_CONV))
    # (e^{2M}-1)/(e^{2M}+1) is tanh(M); the closed form overflows for large M.
    f3 = np.where(m < 0, np.tanh(m), m)
    log_tau = np.log(tau / T_MAX)
    f4 = (1.0 - np.exp(-m * m)) * log_tau
    f5 = np.where(m < 0, (1.0 - np.exp(np.minimum((3.0 * m) ** 3, 0.0))) * log_tau, 0.0)

    sigma = (
        beta[..., 0]
        + beta[..., 1] * f2
        + beta[..., 2] * f3
        + beta[..., 3] * f4
        + beta[..., 4] * f5
    )
    return np.maximum(sigma, VOL_FLOOR)


def _d1_d2(spot, strike, tau, rate, dividend, vol):
    sqrt_tau = np.sqrt(tau)
    d1 = (np.log(spot / strike) + (rate - dividend + 0.5 * vol * vol) * tau) / (vol * sqrt_tau)
    return d1, d1 - vol * sqrt_tau


def bs_price(quote: OptionQuote | None = None, kind: str = "call", *,
             spot=None, strike=None, tau=None, rate=None, dividend=None, vol=None):
    """Black-Scholes price with continuous dividend yield.

    Accepts either an OptionQuote or keyword arrays (vectorized).  tau == 0
    returns intrinsic value.
    """
    if quote is not None:
        spot, strike, tau = quote.spot, quote.strike, quote.tau
        rate, dividend, vol = quote.rate, quote.dividend, quote.vol
    spot = np.asarray(spot, dtype=float)
    strike = np.asarray(strike, dtype=float)
    tau = np.asarray(tau, dtype=float)
    vol = np.asarray(vol, dtype=float)
    if kind not in ("call", "put"):
        raise DomainError(f"unknown option kind {kind!r}")

    intrinsic = np.maximum(spot - strike, 0.0) if kind == "call" else np.maximum(strike - spot, 0.0)
    live = (tau > 0) & (vol > 0)
    tau_s = np.where(live, tau, 1.0)
    vol_s = np.where(live, vol, 1.0)
    d1, d2 = _d1_d2(spot, strike, tau_s, rate, dividend, vol_s)
    disc_q = spot * np.exp(-dividend * tau_s)
    disc_r = strike * np.exp(-rate * tau_s)
    if kind == "call":
        price = disc_q * ndtr(d1) - disc_r * ndtr(d2)
    else:
        price = disc_r * ndtr(-d2) - disc_q * ndtr(-d1)
    # vol == 0 with tau > 0: forward intrinsic, discounted
    fwd_intrinsic = np.exp(-rate * tau_s) * np.maximum(
        (spot * np.exp((rate - dividend) * tau_s) - strike) * (1.0 if kind == "call" else -1.0), 0.0
    )
    out = np.where(live, price, np.where(tau > 0, fwd_intrinsic, intrinsic))
    return out if out.shape else float(out)


def bs_delta(quote: OptionQuote | None = None, kind: str = "call", *,
             spot=None, strike=None, tau=None, rate=None, dividend=None, vol=None):
    """Black-Scholes delta; undefined at expiry (raises)."""
    if quote is not None:
        spot, strike, tau = quote.spot, quote.strike, quote.tau
        rate, dividend, vol = quote.rate, quote.dividend, quote.vol
    spot = np.asarray(spot, dtype=float)
    tau = np.asarray(tau, dtype=float)
    vol = np.asarray(vol, dtype=float)
    if np.any(tau <= 0):
        raise DomainError("Greeks are undefined at expiry; callers must settle payoffs instead")
    if kind not in ("call", "put"):
        raise DomainError(f"unknown option kind {kind!r}")
    d1, _ = _d1_d2(spot, strike, tau, rate, dividend, vol)
    delta_call = np.exp(-dividend * tau) * ndtr(d1)
    if kind == "call":
        out = delta_call
    else:
        out = delta_call - np.exp(-dividend * tau)
    return out if out.shape else float(out)


def bs_gamma(quote: OptionQuote | None = None, *,
             spot=None, strike=None, tau=None, rate=None, dividend=None, vol=None):
    """Black-Scholes gamma (same for calls and puts); undefined at expiry."""
    if quote is not None:
        spot, strike, tau = quote.spot, quote.strike, quote.tau
        rate, dividend, vol = quote.rate, quote.dividend, quote.vol
    spot = np.asarray(spot, dtype=float)
    tau = np.asarray(tau, dtype=float)
    vol = np.asarray(vol, dtype=float)
    if np.any(tau <= 0):
        raise DomainError("Greeks are undefined at expiry; callers must settle payoffs instead")
    d1, _ = _d1_d2(spot, strike, tau, rate, dividend, vol)
    pdf = np.exp(-0.5 * d1 * d1) / np.sqrt(2.0 * np.pi)
    out = np.exp(-dividend * tau) * pdf / (spot * vol * np.sqrt(tau))
    return out if out.shape else float(out)


def leland_vol(sigma, kappa, rebalance_interval):
    """Transaction-cost adjusted volatility for delta hedging.

    sigma_adj^2 = sigma^2 * [1 + sqrt(2/pi) * 2*kappa / (sigma * sqrt(interval))].
    """
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0):
        raise DomainError("leland_vol requires sigma > 0")
    if kappa < 0:
        raise DomainError("leland_vol requires kappa >= 0")
    if rebalance_interval <= 0:
        raise DomainError("leland_vol requires a positive rebalancing interval")
    adj = 1.0 + np.sqrt(2.0 / np.pi) * (2.0 * kappa) / (sigma * np.sqrt(rebalance_interval))
    out = sigma * np.sqrt(adj)
    return out if out.shape else float(out)

"""Instrument pricing off the simulated surface and hedging-episode accounting.

An episode holds a short position in a straddle expiring at ``maturity_day``
and rebalances a book of cash, underlying, and one longer-dated call once per
day.  Rebalancing is suppressed whenever the proposed position change, summed
in absolute value across both risky instruments, stays within the no-trade
threshold.  Trades are financed out of cash net of proportional costs, so the
portfolio value process is self-financing by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jivr import DT, MarketState, PathSet
from .volsurface import DomainError, bs_delta, bs_gamma, bs_price, moneyness, surface_vol


@dataclass(frozen=True)
class InstrumentSpec:
    kind: str                  # "straddle" | "call" | "put"
    strike: float
    maturity_day: int          # trading-day index

    def __post_init__(self):
        if self.kind not in ("straddle", "call", "put"):
            raise DomainError(f"unknown instrument kind {self.kind!r}")
        if self.maturity_day <= 0:
            raise DomainError("maturity_day must be positive")
        if self.strike <= 0:
            raise DomainError("strike must be positive")


@dataclass(frozen=True)
class CostSpec:
    """Proportional cost rates; in the experiments kappa1 << kappa2."""

    kappa1: float = 0.0        # underlying
    kappa2: float = 0.0        # hedging option

    def __post_init__(self):
        if self.kappa1 < 0 or self.kappa2 < 0:
            raise DomainError("cost rates must be nonnegative")


@dataclass
class HedgePortfolio:
    cash: float
    shares: float
    options: float
    value: float


def payoff(spec: InstrumentSpec, spot):
    spot = np.asarray(spot, dtype=float)
    if spec.kind == "call":
        out = np.maximum(spot - spec.strike, 0.0)
    elif spec.kind == "put":
        out = np.maximum(spec.strike - spot, 0.0)
    else:
        out = np.maximum(spot - spec.strike, 0.0) + np.maximum(spec.strike - spot, 0.0)
    return out if out.shape else float(out)


def _surface_iv(spec: InstrumentSpec, spot, betas, tau, rate, dividend):
    m = moneyness(spot, spec.strike, rate, dividend, tau)
    return surface_vol(betas, m, tau)


def price_instrument(spec: InstrumentSpec, state: MarketState, day: int,
                     rate: float, dividend: float):
    """Value at ``day``: payoff at maturity, else Black-Scholes at the surface IV."""
    if day > spec.maturity_day:
        raise DomainError(f"day {day} is past maturity {spec.maturity_day}")
    if day == spec.maturity_day:
        out = payoff(spec, state.spot)
        return out if np.ndim(out) else float(out)
    tau = (spec.maturity_day - day) / 252.0
    iv = _surface_iv(spec, state.spot, state.betas, tau, rate, dividend)
    kw = dict(spot=state.spot, strike=spec.strike, tau=tau, rate=rate,
              dividend=dividend, vol=iv)
    if spec.kind == "straddle":
        out = bs_price(kind="call", **kw) + bs_price(kind="put", **kw)
    else:
        out = bs_price(kind=spec.kind, **kw)
    return out if np.ndim(out) else float(out)


def instrument_greeks(spec: InstrumentSpec, spot, betas, day: int,
                      rate: float, dividend: float):
    """(value, delta, gamma) with the instrument's own surface IV; day < maturity."""
    if day >= spec.maturity_day:
        raise DomainError("Greeks are undefined at or past maturity")
    tau = (spec.maturity_day - day) / 252.0
    iv = _surface_iv(spec, spot, betas, tau, rate, dividend)
    kw = dict(spot=spot, strike=spec.strike, tau=tau, rate=rate, dividend=dividend, vol=iv)
    gamma = bs_gamma(**kw)
    if spec.kind == "straddle":
        value = bs_price(kind="call", **kw) + bs_price(kind="put", **kw)
        delta = bs_delta(kind="call", **kw) + bs_delta(kind="put", **kw)
        gamma = 2.0 * gamma
    else:
        value = bs_price(kind=spec.kind, **kw)
        delta = bs_delta(kind=spec.kind, **kw)
    return value, delta, gamma


@dataclass
class MarketPanels:
    """Per-day prices and practitioner Greeks shared by all policies.

    Hedged-instrument Greeks at its maturity day are NaN (undefined); the
    hedging option outlives the episode so its columns are fully populated.
    """

    spot: np.ndarray            # (n, T+1)
    straddle: np.ndarray        # (n, T+1) value of the hedged instrument
    straddle_delta: np.ndarray
    straddle_gamma: np.ndarray
    straddle_iv: np.ndarray     # surface IV at the hedged instrument's (M, tau)
    option: np.ndarray          # (n, T+1) value of the hedging option
    option_delta: np.ndarray
    option_gamma: np.ndarray
    betas: np.ndarray           # (n, T+1, 5)
    h_r: np.ndarray             # (n, T+1)
    h: np.ndarray               # (n, T+1, 5)
    tau: np.ndarray             # (T+1,) straddle time-to-maturity, years
    s0: float
    rate: float
    dividend: float
    hedged: InstrumentSpec
    hedge_opt: InstrumentSpec

    @property
    def n_paths(self):
        return self.spot.shape[0]

    @property
    def horizon(self):
        return self.spot.shape[1] - 1


def build_panels(paths: PathSet, hedged: InstrumentSpec, hedge_opt: InstrumentSpec,
                 rate: float, dividend: float) -> MarketPanels:
    if paths.horizon_days != hedged.maturity_day:
        raise DomainError(
            f"path horizon {paths.horizon_days} != hedged maturity {hedged.maturity_day}"
        )
    if hedge_opt.maturity_day <= hedged.maturity_day:
        raise DomainError("hedging option must outlive the hedged instrument")

    n, t1 = paths.spot.shape
    horizon = t1 - 1
    straddle = np.empty((n, t1))
    s_delta = np.full((n, t1), np.nan)
    s_gamma = np.full((n, t1), np.nan)
    s_iv = np.full((n, t1), np.nan)
    option = np.empty((n, t1))
    o_delta = np.empty((n, t1))
    o_gamma = np.empty((n, t1))

    for day in range(t1):
        spot = paths.spot[:, day]
        betas = paths.betas[:, day]
        if day < hedged.maturity_day:
            straddle[:, day], s_delta[:, day], s_gamma[:, day] = instrument_greeks(
                hedged, spot, betas, day, rate, dividend)
            tau_day = (hedged.maturity_day - day) / 252.0
            s_iv[:, day] = _surface_iv(hedged, spot, betas, tau_day, rate, dividend)
        else:
            straddle[:, day] = payoff(hedged, spot)
        option[:, day], o_delta[:, day], o_gamma[:, day] = instrument_greeks(
            hedge_opt, spot, betas, day, rate, dividend)

    return MarketPanels(
        spot=paths.spot, straddle=straddle, straddle_delta=s_delta,
        straddle_gamma=s_gamma, straddle_iv=s_iv, option=option,
        option_delta=o_delta, option_gamma=o_gamma,
        betas=paths.betas, h_r=paths.h_r, h=paths.h,
        tau=(hedged.maturity_day - np.arange(t1)) / 252.0,
        s0=float(np.mean(paths.spot[:, 0])), rate=rate, dividend=dividend,
        hedged=hedged, hedge_opt=hedge_opt,
    )


def rebalance(portfolio: HedgePortfolio, proposal, prices, costs: CostSpec,
              threshold_l: float) -> HedgePortfolio:
    """Apply the no-trade gate and the self-financing cash residual.

    ``proposal`` is (shares, options); ``prices`` is (spot, option_value).
    Position changes within the gate leave the portfolio untouched and cost
    nothing.  Cash may go negative; leverage is only restrained by the soft
    constraint during training.
    """
    new_shares, new_options = float(proposal[0]), float(proposal[1])
    if not (np.isfinite(new_shares) and np.isfinite(new_options)):
        raise DomainError("proposal must be finite")
    spot, option_value = float(prices[0]), float(prices[1])
    deviation = abs(new_shares - portfolio.shares) + abs(new_options - portfolio.options)
    if deviation <= threshold_l:
        return HedgePortfolio(portfolio.cash, portfolio.shares, portfolio.options,
                              portfolio.value)
    cost = costs.kappa1 * spot * abs(new_shares - portfolio.shares) \
        + costs.kappa2 * option_value * abs(new_options - portfolio.options)
    cash = portfolio.value - new_shares * spot - new_options * option_value - cost
    return HedgePortfolio(cash=cash, shares=new_shares, options=new_options,
                          value=portfolio.value)


@dataclass
class EpisodeResult:
    """Full accounting trail of a batch of hedging episodes.

    Arrays are (n_paths, T+1) unless noted; ``cost`` and ``rebalanced`` cover
    trading days 0..T-1 in their first T columns (column T is zero/False).
    """

    spot: np.ndarray
    straddle: np.ndarray       # hedged-instrument value, payoff at T
    option: np.ndarray         # hedging-option value
    shares: np.ndarray         # phi_S held out of day t (post-trade)
    options: np.ndarray        # phi_O held out of day t (post-trade)
    cash: np.ndarray           # cash position out of day t
    value: np.ndarray          # portfolio value V_t, pre-trade mark at day t
    tracking_error: np.ndarray # xi_t = straddle_t - V_t
    cost: np.ndarray           # transaction cost paid at day t
    rebalanced: np.ndarray     # gate fired at day t (bool)

    @property
    def n_paths(self):
        return self.spot.shape[0]

    @property
    def horizon(self):
        return self.spot.shape[1] - 1

    @property
    def terminal_error(self) -> np.ndarray:
        return self.tracking_error[:, -1]

    @property
    def initial_value(self) -> np.ndarray:
        return self.value[:, 0]

    def to_frame(self):
        import pandas as pd

        n, t1 = self.spot.shape
        return pd.DataFrame({
            "path": np.repeat(np.arange(n), t1),
            "day": np.tile(np.arange(t1), n),
            "spot": self.spot.ravel(),
            "straddle_value": self.straddle.ravel(),
            "option_value": self.option.ravel(),
            "shares": self.shares.ravel(),
            "options": self.options.ravel(),
            "cash": self.cash.ravel(),
            "portfolio_value": self.value.ravel(),
            "tracking_error": self.tracking_error.ravel(),
            "cost_paid": self.cost.ravel(),
            "rebalanced": self.rebalanced.ravel().astype(int),
        })

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False, float_format="%.17g")


def run_episode(paths_or_panels, hedged: InstrumentSpec | None = None,
                hedge_opt: InstrumentSpec | None = None, policy=None,
                costs: CostSpec = CostSpec(), threshold_l: float | None = None,
                rate: float | None = None, dividend: float | None = None) -> EpisodeResult:
    """Run self-financing hedging episodes for every path in the batch.

    ``policy`` must expose ``reset(n_paths)`` and ``propose(day, panels,
    value, shares, options) -> (shares', options')``.  The no-trade threshold
    defaults to the policy's own ``threshold_l`` (see ``policy.gated``), else 0.
    """
    if isinstance(paths_or_panels, MarketPanels):
        panels = paths_or_panels
    else:
        panels = build_panels(paths_or_panels, hedged, hedge_opt, rate, dividend)
    rate = panels.rate
    dividend = panels.dividend
    if threshold_l is None:
        threshold_l = float(getattr(policy, "threshold_l", 0.0))
    if threshold_l < 0:
        raise DomainError("no-trade threshold must be nonnegative")

    n, t1 = panels.spot.shape
    horizon = t1 - 1
    grow_r = np.exp(rate * DT)
    grow_q = np.exp(dividend * DT)

    shares = np.zeros((n, t1))
    options = np.zeros((n, t1))
    cash = np.zeros((n, t1))
    value = np.zeros((n, t1))
    cost = np.zeros((n, t1))
    rebalanced = np.zeros((n, t1), dtype=bool)

    value[:, 0] = panels.straddle[:, 0]
    policy.reset(n)
    cur_shares = np.zeros(n)
    cur_options = np.zeros(n)
    cur_cash = np.zeros(n)

    for t in range(horizon):
        v_t = value[:, t]
        prop_s, prop_o = policy.propose(t, panels, v_t, cur_shares, cur_options)
        deviation = np.abs(prop_s - cur_shares) + np.abs(prop_o - cur_options)
        trade = deviation > threshold_l
        new_s = np.where(trade, prop_s, cur_shares)
        new_o = np.where(trade, prop_o, cur_options)
        spot_t = panels.spot[:, t]
        opt_t = panels.option[:, t]
        paid = np.where(
            trade,
            costs.kappa1 * spot_t * np.abs(new_s - cur_shares)
            + costs.kappa2 * opt_t * np.abs(new_o - cur_options),
            0.0,
        )
        cur_cash = v_t - new_s * spot_t - new_o * opt_t - paid
        cur_shares, cur_options = new_s, new_o

        shares[:, t] = cur_shares
        options[:, t] = cur_options
        cash[:, t] = cur_cash
        cost[:, t] = paid
        rebalanced[:, t] = trade
        value[:, t + 1] = (cur_cash * grow_r
                           + cur_shares * panels.spot[:, t + 1] * grow_q
                           + cur_options * panels.option[:, t + 1])

    # positions carried into T stay on the last trading day's columns; repeat
    # them at T for a rectangular trail
    shares[:, horizon] = cur_shares
    options[:, horizon] = cur_options
    cash[:, horizon] = cur_cash

    return EpisodeResult(
        spot=panels.spot.copy(), straddle=panels.straddle.copy(),
        option=panels.option.copy(), shares=shares, options=options, cash=cash,
        value=value, tracking_error=panels.straddle - value, cost=cost,
        rebalanced=rebalanced,
    )


def rebalancing_frequency(result: EpisodeResult) -> np.ndarray:
    """Per-path fraction of trading days with a position adjustment."""
    horizon = result.horizon
    return result.rebalanced[:, :horizon].mean(axis=1)


def hedging_cost(result: EpisodeResult, rate: float) -> np.ndarray:
    """Per-path sum of discounted transaction costs."""
    horizon = result.horizon
    t = np.arange(horizon)
    disc = np.exp(-rate * DT * t)
    return result.cost[:, :horizon] @ disc

"""Benchmarking, diagnostics, sweeps, and backtesting on historical series.

Every operation is a pure function of its inputs and a seed: rerunning with
the same configuration reproduces outputs byte for byte.  Table operations
return pandas frames; ``write_csv`` stores them with stable formatting, and
each figure-shaped result has a matplotlib renderer that writes a PNG next to
the delimited output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from . import jivr as jivr_mod
from .jivr import DT, InitialStatePool, JivrParams, MarketState, PathSet
from .market import (CostSpec, EpisodeResult, InstrumentSpec, MarketPanels,
                     build_panels, hedging_cost, rebalancing_frequency, run_episode)
from .risk import RiskMeasure, risk
from .volsurface import DomainError


def write_csv(frame: pd.DataFrame, path):
    frame.to_csv(path, index=False, float_format="%.12g")


def _figure_backend():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


# ---------------------------------------------------------------------------
# metric tables


def metrics_from_errors(errors: np.ndarray, alpha: float = 0.95) -> dict:
    errors = np.asarray(errors, dtype=float)
    return {
        "mean": float(errors.mean()),
        "std": float(errors.std(ddof=0)),
        "mse": risk(RiskMeasure("mse"), errors),
        "smse": risk(RiskMeasure("smse"), errors),
        "cvar95": risk(RiskMeasure("cvar", alpha), errors),
    }


class StreamingMetrics:
    """Running reduction of the moment-based metrics; CVaR needs the sample."""

    def __init__(self):
        self.count = 0
        self.total = 0.0
        self.total_sq = 0.0
        self.total_pos_sq = 0.0

    def update(self, errors: np.ndarray):
        errors = np.asarray(errors, dtype=float)
        self.count += errors.size
        self.total += errors.sum()
        self.total_sq += (errors**2).sum()
        self.total_pos_sq += (np.maximum(errors, 0.0) ** 2).sum()

    def result(self) -> dict:
        mean = self.total / self.count
        mse = self.total_sq / self.count
        return {
            "mean": mean,
            "std": float(np.sqrt(max(mse - mean**2, 0.0))),
            "mse": mse,
            "smse": self.total_pos_sq / self.count,
        }


def evaluate_policies(chunks, policies: dict, costs: CostSpec,
                      hedged: InstrumentSpec, hedge_opt: InstrumentSpec,
                      rate: float, dividend: float, keep_trails: bool = False):
    """Run each policy over a stream of PathSet chunks.

    Returns {name: terminal_errors}, {name: rf}, {name: hc}, and optionally
    the trails of the final chunk (for trail-shaped diagnostics).
    """
    errors = {name: [] for name in policies}
    rfs = {name: [] for name in policies}
    hcs = {name: [] for name in policies}
    last_trails = {}
    for chunk in chunks:
        panels = build_panels(chunk, hedged, hedge_opt, rate, dividend)
        for name, policy in policies.items():
            trail = run_episode(panels, policy=policy, costs=costs)
            errors[name].append(trail.terminal_error.copy())
            rfs[name].append(rebalancing_frequency(trail))
            hcs[name].append(hedging_cost(trail, rate))
            if keep_trails:
                last_trails[name] = trail
    errors = {k: np.concatenate(v) for k, v in errors.items()}
    rfs = {k: np.concatenate(v) for k, v in rfs.items()}
    hcs = {k: np.concatenate(v) for k, v in hcs.items()}
    return errors, rfs, hcs, last_trails


def benchmark_table(errors_by_policy: dict, rf_by_policy: dict | None = None,
                    hc_by_policy: dict | None = None, alpha: float = 0.95) -> pd.DataFrame:
    """Metric table across policies: mean, std, MSE, SMSE, CVaR (plus RF/HC)."""
    rows = []
    for name, errors in errors_by_policy.items():
        row = {"policy": name, **metrics_from_errors(errors, alpha)}
        if rf_by_policy is not None and name in rf_by_policy:
            row["rebalancing_frequency"] = float(np.mean(rf_by_policy[name]))
        if hc_by_policy is not None and name in hc_by_policy:
            row["hedging_cost"] = float(np.mean(hc_by_policy[name]))
        rows.append(row)
    return pd.DataFrame(rows)


def render_error_histogram(errors_by_policy: dict, path, bins: int = 120,
                           clip: float | None = 6.0):
    plt = _figure_backend()
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for name, errors in errors_by_policy.items():
        data = np.asarray(errors)
        if clip is not None:
            data = np.clip(data, -clip, clip)
        ax.hist(data, bins=bins, histtype="step", density=True, label=name)
    ax.set_xlabel("terminal hedging error")
    ax.set_ylabel("density")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


# ---------------------------------------------------------------------------
# trail-shaped diagnostics


def tracking_error_curves(trails: EpisodeResult) -> pd.DataFrame:
    """Per-day mean, RMS, and positive-part RMS of the tracking error."""
    xi = trails.tracking_error
    pos = np.where(xi > 0, xi, 0.0)
    return pd.DataFrame({
        "day": np.arange(xi.shape[1]),
        "mean_error": xi.mean(axis=0),
        "rms_error": np.sqrt((xi**2).mean(axis=0)),
        "positive_rms_error": np.sqrt((pos**2).mean(axis=0)),
    })


def render_tracking_curves(curves_by_policy: dict, path):
    plt = _figure_backend()
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.6), sharex=True)
    titles = ["mean_error", "rms_error", "positive_rms_error"]
    for ax, col in zip(axes, titles):
        for name, frame in curves_by_policy.items():
            ax.plot(frame["day"], frame[col], label=name)
        ax.set_title(col.replace("_", " "))
        ax.set_xlabel("day")
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def position_correlation(trails_a: EpisodeResult, trails_b: EpisodeResult) -> pd.DataFrame:
    """Per-day Pearson correlation of option positions across paths.

    Days where either book has zero cross-path variance are emitted as NaN
    (written as empty fields in CSV), not as a number.
    """
    if trails_a.spot.shape != trails_b.spot.shape or not np.array_equal(
            trails_a.spot[:, 0], trails_b.spot[:, 0]):
        raise DomainError("position correlation requires trails over identical paths")
    horizon = trails_a.horizon
    out = np.full(horizon, np.nan)
    for t in range(horizon):
        a = trails_a.options[:, t]
        b = trails_b.options[:, t]
        sa, sb = a.std(), b.std()
        if sa > 0 and sb > 0:
            out[t] = float(np.corrcoef(a, b)[0, 1])
    return pd.DataFrame({"day": np.arange(horizon), "pearson_correlation": out})


def render_position_correlation(frames_by_label: dict, path):
    plt = _figure_backend()
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, frame in frames_by_label.items():
        ax.plot(frame["day"], frame["pearson_correlation"], label=label)
    ax.axhline(0.0, color="gray", lw=0.6)
    ax.set_xlabel("day")
    ax.set_ylabel("Pearson correlation of option positions")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


# ---------------------------------------------------------------------------
# risk-premium nested simulation


def risk_premium_samples(params: JivrParams, paths: PathSet, trails: EpisodeResult,
                         hedge_opt: InstrumentSpec, sample_size: int, n_inner: int,
                         seed: int, rate: float, dividend: float) -> pd.DataFrame:
    """Nested-simulation risk premium of the hedge option at sampled (path, day).

    RP = discounted physical-measure expected payoff minus the option price;
    the frame pairs each estimate with the position entered the same day.
    """
    if paths.eps is None:
        raise DomainError("risk premium needs paths simulated with keep_full_state=True")
    n, t1 = paths.spot.shape
    horizon = t1 - 1
    rng = np.random.default_rng(seed)
    sel_paths = rng.integers(0, n, sample_size)
    sel_days = rng.integers(0, horizon, sample_size)

    rp = np.empty(sample_size)
    inner_offset = 0
    for day in np.unique(sel_days):
        mask = sel_days == day
        rows = sel_paths[mask]
        states = paths.state_at(int(day), rows)
        tiled = states.take(np.repeat(np.arange(len(rows)), n_inner))
        remaining = hedge_opt.maturity_day - int(day)
        inner = jivr_mod.simulate_from_states(
            params, tiled, remaining, seed=seed + 1,
            path_offset=inner_offset)
        inner_offset += len(tiled)
        terminal_spot = inner.spot[:, -1].reshape(len(rows), n_inner)
        payoff = np.maximum(terminal_spot - hedge_opt.strike, 0.0)
        disc = np.exp(-rate * DT * remaining)
        price_now = _option_price_at(paths, hedge_opt, int(day), rows, rate, dividend)
        rp[mask] = disc * payoff.mean(axis=1) - price_now
    position = trails.options[sel_paths, sel_days]   # position entered at that day
    return pd.DataFrame({
        "path": sel_paths, "day": sel_days, "risk_premium": rp,
        "option_position": position,
    })


def _option_price_at(paths: PathSet, spec: InstrumentSpec, day: int, rows,
                     rate: float, dividend: float) -> np.ndarray:
    from .market import price_instrument

    state = MarketState(
        spot=paths.spot[rows, day], betas=paths.betas[rows, day],
        h_r=paths.h_r[rows, day], h=paths.h[rows, day],
        prev_beta2=paths.betas[rows, day, 1], prev_eps=np.zeros((len(rows), 6)),
    )
    return np.asarray(price_instrument(spec, state, day, rate, dividend))


def rank_correlation(x, y) -> float:
    from scipy.stats import spearmanr

    rho = spearmanr(x, y).statistic
    return float(rho)


def render_rank_scatter(frame: pd.DataFrame, path):
    plt = _figure_backend()
    fig, ax = plt.subplots(figsize=(5, 5))
    rx = np.argsort(np.argsort(frame["risk_premium"]))
    ry = np.argsort(np.argsort(frame["option_position"]))
    ax.scatter(rx, ry, s=3, alpha=0.4)
    ax.set_xlabel("risk-premium rank")
    ax.set_ylabel("option-position rank")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


# ---------------------------------------------------------------------------
# statistical-arbitrage check


def stat_arb_test(rl_trails: EpisodeResult, dg_trails: EpisodeResult,
                  measure: RiskMeasure, costs: CostSpec, rate: float,
                  dividend: float) -> float:
    """Risk of the negated terminal value of the zero-investment differential book.

    The differential strategy holds the position gap between the two books,
    starts from zero cash, finances trades internally, and pays proportional
    costs on its own trades.  Positive values indicate no statistical
    arbitrage under the measure.
    """
    if not np.array_equal(rl_trails.spot, dg_trails.spot):
        raise DomainError("stat-arb test requires trails on identical paths")
    spot = rl_trails.spot
    option = rl_trails.option
    n, t1 = spot.shape
    horizon = t1 - 1
    grow_r = np.exp(rate * DT)
    grow_q = np.exp(dividend * DT)

    d_shares = rl_trails.shares - dg_trails.shares
    d_options = rl_trails.options - dg_trails.options
    value = np.zeros(n)
    prev_s = np.zeros(n)
    prev_o = np.zeros(n)
    for t in range(horizon):
        new_s = d_shares[:, t]
        new_o = d_options[:, t]
        paid = costs.kappa1 * spot[:, t] * np.abs(new_s - prev_s) \
            + costs.kappa2 * option[:, t] * np.abs(new_o - prev_o)
        cash = value - new_s * spot[:, t] - new_o * option[:, t] - paid
        value = cash * grow_r + new_s * spot[:, t + 1] * grow_q + new_o * option[:, t + 1]
        prev_s, prev_o = new_s, new_o
    return risk(measure, -value)


# ---------------------------------------------------------------------------
# sensitivity sorting


SENSITIVITY_VARIABLES = ("beta1", "beta2", "beta3", "beta4", "beta5", "h_r")


def sensitivity_sort(day0_states: pd.DataFrame, positions: np.ndarray,
                     variable: str) -> pd.DataFrame:
    """(variable rank, position) pairs for one state variable."""
    if variable not in day0_states.columns:
        raise DomainError(f"unknown sensitivity variable {variable!r}")
    order = np.argsort(day0_states[variable].to_numpy(), kind="stable")
    return pd.DataFrame({
        "rank": np.arange(len(order)),
        variable: day0_states[variable].to_numpy()[order],
        "option_position": np.asarray(positions)[order],
    })


def sensitivity_spearman(day0_states: pd.DataFrame, positions: np.ndarray) -> pd.DataFrame:
    rows = []
    for var in SENSITIVITY_VARIABLES:
        rows.append({
            "variable": var,
            "spearman": rank_correlation(day0_states[var].to_numpy(), positions)
            if np.std(positions) > 0 else 0.0,
        })
    return pd.DataFrame(rows)


def day0_state_frame(paths: PathSet) -> pd.DataFrame:
    return pd.DataFrame({
        **{f"beta{i+1}": paths.betas[:, 0, i] for i in range(5)},
        "h_r": paths.h_r[:, 0],
        **{f"h{i+1}": paths.h[:, 0, i] for i in range(5)},
    })


def render_sensitivity(frames_by_variable: dict, path):
    plt = _figure_backend()
    n = len(frames_by_variable)
    fig, axes = plt.subplots(2, (n + 1) // 2, figsize=(3.2 * ((n + 1) // 2), 6))
    for ax, (var, frame) in zip(np.ravel(axes), frames_by_variable.items()):
        ax.scatter(frame["rank"], frame["option_position"], s=2, alpha=0.3)
        ax.set_title(var, fontsize=9)
    for ax in np.ravel(axes)[n:]:
        ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


# ---------------------------------------------------------------------------
# bootstrap distribution of the risk estimates


def bootstrap_penalty(errors: np.ndarray, measure: RiskMeasure, batch: int = 1000,
                      resamples: int = 1000, seed: int = 0) -> np.ndarray:
    """Distribution of the batch risk estimator under resampling."""
    errors = np.asarray(errors, dtype=float)
    rng = np.random.default_rng(seed)
    out = np.empty(resamples)
    for k in range(resamples):
        sample = errors[rng.integers(0, errors.size, batch)]
        out[k] = risk(measure, sample)
    return out


def distribution_overlap(a: np.ndarray, b: np.ndarray) -> float:
    """Fraction of the union range covered by the intersection of the ranges."""
    lo = max(a.min(), b.min())
    hi = min(a.max(), b.max())
    span = max(a.max(), b.max()) - min(a.min(), b.min())
    if span <= 0:
        return 1.0
    return max(hi - lo, 0.0) / span


def render_bootstrap(dists_by_policy: dict, path):
    plt = _figure_backend()
    fig, ax = plt.subplots(figsize=(7, 4))
    for name, dist in dists_by_policy.items():
        ax.hist(dist, bins=60, histtype="step", density=True, label=name)
    ax.set_xlabel("bootstrapped risk estimate")
    ax.set_ylabel("density")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


# ---------------------------------------------------------------------------
# backtesting on an ingested daily series


@dataclass
class BacktestSeries:
    """Dated history of (return, surface factors) with optional variance columns."""

    dates: np.ndarray            # (n,) as numpy datetime64[D]
    returns: np.ndarray          # (n,) daily log excess returns; first entry unused
    betas: np.ndarray            # (n, 5)
    h_r: np.ndarray | None = None
    h: np.ndarray | None = None
    max_gap_days: int = 14

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        if np.any(np.diff(dates).astype(int) <= 0):
            raise DomainError("backtest series dates must be strictly increasing")
        if np.any(np.diff(dates).astype(int) > self.max_gap_days):
            raise DomainError(f"backtest series has a gap above {self.max_gap_days} days")
        object.__setattr__(self, "dates", dates)

    def __len__(self):
        return len(self.dates)

    @classmethod
    def from_csv(cls, path, max_gap_days: int = 14) -> "BacktestSeries":
        frame = pd.read_csv(path)
        required = ["date", "R"] + [f"beta{i}" for i in range(1, 6)]
        missing = [c for c in required if c not in frame.columns]
        if missing:
            raise ValueError(f"backtest CSV {path} is missing columns: {missing}")
        h_cols = ["h_r"] + [f"h{i}" for i in range(1, 6)]
        has_h = all(c in frame.columns for c in h_cols)
        return cls(
            dates=frame["date"].to_numpy(dtype="datetime64[D]"),
            returns=frame["R"].to_numpy(dtype=float),
            betas=frame[[f"beta{i}" for i in range(1, 6)]].to_numpy(dtype=float),
            h_r=frame["h_r"].to_numpy(dtype=float) if has_h else None,
            h=frame[[f"h{i}" for i in range(1, 6)]].to_numpy(dtype=float) if has_h else None,
            max_gap_days=max_gap_days,
        )

    def to_csv(self, path):
        frame = pd.DataFrame({
            "date": self.dates.astype(str), "R": self.returns,
            **{f"beta{i+1}": self.betas[:, i] for i in range(5)},
        })
        if self.h_r is not None:
            frame["h_r"] = self.h_r
            for i in range(5):
                frame[f"h{i+1}"] = self.h[:, i]
        write_csv(frame, path)


def filter_variances(series: BacktestSeries, params: JivrParams):
    """Reconstruct the variance series and innovations implied by (R, beta).

    Starts each variance at its anchor, then alternates: variances are
    predictable from the previous day's innovations, innovations are backed
    out of the observed factor moves and returns.
    """
    from .stochastics import NigDistribution
    from .volsurface import surface_vol

    n = len(series)
    nig_r = NigDistribution(params.nig_r)
    anchor_sq = params.factor_anchor_sq()
    h_r = np.empty(n)
    h = np.empty((n, 5))
    eps = np.zeros((n, 6))
    iv0 = surface_vol(series.betas[0], 0.0, 1.0 / 12.0)
    h_r[0] = (params.omega_r * iv0) ** 2
    h[0] = [(params.omega_1 * iv0) ** 2, *anchor_sq[1:]]
    for t in range(1, n):
        iv = surface_vol(series.betas[t - 1], 0.0, 1.0 / 12.0)
        y = (params.omega_r * iv) ** 2
        u = (params.omega_1 * iv) ** 2
        e = eps[t - 1]
        h_r[t] = np.clip(y + params.kappa_r * (h_r[t - 1] - y)
                         + params.a_r * h_r[t - 1]
                         * (e[0] ** 2 - 1 - 2 * params.gamma_r * e[0]),
                         1e-8, params.cap_h_r)
        for i in range(5):
            anchor = u if i == 0 else anchor_sq[i]
            h[t, i] = np.clip(anchor + params.kappa[i] * (h[t - 1, i] - anchor)
                              + params.a[i] * h[t - 1, i]
                              * (e[i + 1] ** 2 - 1 - 2 * params.gamma[i] * e[i + 1]),
                              1e-8, params.cap_h_mult * anchor)
        s_dt = np.sqrt(h_r[t] * DT)
        premium = nig_r.cgf(-params.equity_premium_lambda * s_dt) \
            - nig_r.cgf((1 - params.equity_premium_lambda) * s_dt) + nig_r.cgf(s_dt)
        eps[t, 0] = (series.returns[t] - premium + nig_r.cgf(s_dt)) / s_dt
        drift = params.alpha + params.theta @ series.betas[t - 1]
        drift[1] += params.nu * series.betas[max(t - 2, 0), 1]
        eps[t, 1:] = (series.betas[t] - drift) / np.sqrt(h[t] * DT)
    return h_r, h, eps


def series_to_paths(series: BacktestSeries, params: JivrParams, cadence: int,
                    maturity_days: int, spot0: float = 100.0):
    """Cut the history into hedge windows and pack them as a PathSet.

    Each window is normalized to open at ``spot0`` (pricing is homogeneous in
    the spot/strike pair, so positions are unchanged and errors scale back by
    the open-level factor).  Returns (PathSet, open_indices, scale_factors).
    """
    n = len(series)
    if series.h_r is None or series.h is None:
        h_r, h, _ = filter_variances(series, params)
    else:
        h_r, h = series.h_r, series.h
    log_spot = np.concatenate([[0.0], np.cumsum(
        (params.rate - params.dividend) * DT + series.returns[1:])])
    spot = spot0 * np.exp(log_spot)

    opens = np.arange(0, n - maturity_days, cadence)
    if len(opens) == 0:
        raise DomainError("backtest series is shorter than one hedge window")
    t1 = maturity_days + 1
    win = opens[:, None] + np.arange(t1)[None, :]
    scale = spot[opens] / spot0
    return PathSet(
        spot=spot[win] / scale[:, None],
        betas=series.betas[win], h_r=h_r[win], h=h[win],
    ), opens, scale


def backtest(series: BacktestSeries, policies: dict, params: JivrParams,
             costs: CostSpec, cadence: int = 21, maturity_days: int = 63,
             hedge_maturity_days: int = 84, rate: float | None = None,
             dividend: float | None = None, spot0: float = 100.0):
    """Open a new ATM straddle hedge every ``cadence`` business days.

    Every hedge runs on the historical window with a fresh ATM hedge option;
    returns (per-hedge frame, cumulative-P&L frame).  P&L per hedge is the
    negative terminal hedging error, rescaled to the actual open level.
    """
    rate = params.rate if rate is None else rate
    dividend = params.dividend if dividend is None else dividend
    paths, opens, scale = series_to_paths(series, params, cadence, maturity_days, spot0)
    hedged = InstrumentSpec("straddle", spot0, maturity_days)
    hedge_opt = InstrumentSpec("call", spot0, hedge_maturity_days)
    panels = build_panels(paths, hedged, hedge_opt, rate, dividend)

    per_hedge = {"open_index": opens, "open_date": series.dates[opens].astype(str),
                 "open_spot": paths.spot[:, 0] * scale}
    cumulative = {"open_date": series.dates[opens].astype(str)}
    for name, policy in policies.items():
        trail = run_episode(panels, policy=policy, costs=costs)
        scaled_error = trail.terminal_error * scale
        per_hedge[f"error_{name}"] = scaled_error
        cumulative[f"cum_pnl_{name}"] = np.cumsum(-scaled_error)
    return pd.DataFrame(per_hedge), pd.DataFrame(cumulative)


def render_cumulative_pnl(cumulative: pd.DataFrame, path):
    plt = _figure_backend()
    fig, ax = plt.subplots(figsize=(8, 4))
    for col in cumulative.columns:
        if col.startswith("cum_pnl_"):
            ax.plot(np.arange(len(cumulative)), cumulative[col],
                    label=col.removeprefix("cum_pnl_"))
    ax.set_xlabel("hedge number")
    ax.set_ylabel("cumulative P&L")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def synthetic_backtest_series(params: JivrParams, pool: InitialStatePool,
                              n_days: int, seed: int,
                              start_date: str = "1996-01-04") -> BacktestSeries:
    """Simulator-generated stand-in for the historical (R, beta) series."""
    paths = jivr_mod.simulate(params, pool, 1, n_days, seed, keep_full_state=True)
    log_spot = np.log(paths.spot[0])
    returns = np.concatenate([[0.0], np.diff(log_spot) - (params.rate - params.dividend) * DT])
    base = np.datetime64(start_date)
    # weekday-only calendar
    dates = []
    d = base
    while len(dates) < n_days + 1:
        if np.is_busday(d):
            dates.append(d)
        d += np.timedelta64(1, "D")
    return BacktestSeries(
        dates=np.array(dates, dtype="datetime64[D]"), returns=returns,
        betas=paths.betas[0], h_r=paths.h_r[0], h=paths.h[0],
    )


# ---------------------------------------------------------------------------
# lambda sweep and state-space ablation (training-budget bound)


def lambda_sweep(train_fn, lambdas, measures, risk_tolerance: float = 0.10) -> pd.DataFrame:
    """Run ``train_fn(measure, lam) -> (risk, sc)`` over the grid and select lambda.

    Selection per measure: smallest soft-constraint value among cells whose
    risk is within ``risk_tolerance`` of that measure's minimum.
    """
    rows = []
    for measure in measures:
        cells = []
        for lam in lambdas:
            risk_val, sc_val = train_fn(measure, lam)
            cells.append({"measure": measure, "lambda": lam,
                          "risk": risk_val, "soft_constraint": sc_val})
        best_risk = min(c["risk"] for c in cells)
        eligible = [c for c in cells if c["risk"] <= best_risk * (1.0 + risk_tolerance)
                    or c["risk"] <= best_risk + 1e-12]
        chosen = min(eligible, key=lambda c: (c["soft_constraint"], c["lambda"]))
        for c in cells:
            c["selected"] = c["lambda"] == chosen["lambda"]
            rows.append(c)
    return pd.DataFrame(rows)


ABLATION_MASKS = {
    "full": (),
    "no_straddle_value": ("straddle_value",),
    "no_straddle_block": ("straddle_value", "straddle_delta", "straddle_gamma"),
}


def ablation_table(train_fn, masks: dict | None = None) -> pd.DataFrame:
    """Risk per feature-mask configuration; ``train_fn(excluded) -> risk``."""
    masks = ABLATION_MASKS if masks is None else masks
    rows = []
    for name, excluded in masks.items():
        rows.append({"state_space": name, "excluded": ",".join(excluded),
                     "risk": train_fn(tuple(excluded))})
    return pd.DataFrame(rows)

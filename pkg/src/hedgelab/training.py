"""Minibatch stochastic gradient training of hedging policies.

The episode accounting is rebuilt here as a differentiable graph: innovations
and prices are fixed per path (pathwise gradients), positions flow through a
sigmoid-blended no-trade gate, and the running shortfall indicator of the
soft constraint is replaced by a sigmoid surrogate.  Evaluation always uses
the hard gate and the hard indicator; only gradients use the soft versions.
The network weights and the no-trade threshold are updated by Adam in two
parameter groups with separate learning rates.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import torch

from .market import CostSpec, MarketPanels
from .policy import N_FEATURES, RnnFnnPolicy, features_from_panels
from .risk import PenaltyConfig, RiskMeasure, risk_torch, soft_constraint_torch
from .volsurface import DomainError

DT = 1.0 / 252.0


class TrainingDiverged(RuntimeError):
    """Penalty exceeded the divergence guard; carries the diagnostic value."""


@dataclass
class TrainConfig:
    penalty: PenaltyConfig
    costs: CostSpec = field(default_factory=CostSpec)
    batch_size: int = 1000
    epochs: int = 10
    learning_rate: float = 0.0005
    threshold_learning_rate: float = 0.001
    dropout: float = 0.5
    gate_temperature_start: float = 0.1
    gate_temperature_end: float = 0.01
    sc_temperature_scale: float = 0.05
    seed: int = 0
    gate_mode: str = "soft"           # gradient surrogate; evaluation is always hard
    divergence_limit: float = 1e6
    dtype: str = "float32"

    def __post_init__(self):
        if self.batch_size < 2:
            raise DomainError("batch_size must be at least 2 for the order statistics")
        if self.learning_rate < 0 or self.threshold_learning_rate < 0:
            raise DomainError("learning rates must be nonnegative")
        if self.gate_mode not in ("soft", "hard"):
            raise DomainError("gate_mode must be 'soft' or 'hard'")

    def torch_dtype(self):
        return torch.float64 if self.dtype == "float64" else torch.float32


@dataclass
class TrainReport:
    epochs: list                      # per-epoch dict rows
    final_threshold: float
    wall_seconds: float
    diverged: bool = False

    def to_frame(self):
        import pandas as pd

        return pd.DataFrame(self.epochs)

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False, float_format="%.12g")


class EpisodeDataset:
    """Torch-resident panels: static features plus the price series."""

    def __init__(self, panels: MarketPanels, dtype=torch.float32):
        n, t1 = panels.spot.shape
        horizon = t1 - 1
        static = np.empty((n, horizon, N_FEATURES - 3), dtype=np.float64)
        for t in range(horizon):
            static[:, t, :] = features_from_panels(
                panels, t, np.zeros(n), np.zeros(n), np.zeros(n))[:, : N_FEATURES - 3]
        self.static = torch.as_tensor(static, dtype=dtype)
        self.spot = torch.as_tensor(panels.spot, dtype=dtype)
        self.option = torch.as_tensor(panels.option, dtype=dtype)
        self.straddle = torch.as_tensor(panels.straddle, dtype=dtype)
        self.s0 = float(panels.s0)
        self.rate = panels.rate
        self.dividend = panels.dividend
        self.horizon = horizon

    def __len__(self):
        return self.spot.shape[0]

    def slice(self, idx):
        out = object.__new__(EpisodeDataset)
        out.static = self.static[idx]
        out.spot = self.spot[idx]
        out.option = self.option[idx]
        out.straddle = self.straddle[idx]
        out.s0 = self.s0
        out.rate = self.rate
        out.dividend = self.dividend
        out.horizon = self.horizon
        return out


def episode_loss(policy: RnnFnnPolicy, data: EpisodeDataset, config: TrainConfig,
                 temperature: float, hard_gate: bool = False,
                 hard_indicator: bool = False, threshold=None,
                 proposals: torch.Tensor | None = None):
    """Penalty estimate on one batch; differentiable unless the hard variants are on.

    ``proposals`` (n, T, 2), when given, replaces the policy network: only the
    no-trade threshold is then part of the graph (benchmark threshold runs).
    """
    n = len(data)
    horizon = data.horizon
    dtype = data.spot.dtype
    grow_r = float(np.exp(data.rate * DT))
    grow_q = float(np.exp(data.dividend * DT))
    if threshold is None:
        threshold = policy.threshold_raw.clamp(min=0.0).to(dtype)
    else:
        threshold = threshold.clamp(min=0.0).to(dtype)

    v0 = data.straddle[:, 0]
    value = v0
    shares = torch.zeros(n, dtype=dtype)
    options = torch.zeros(n, dtype=dtype)
    xi = [data.straddle[:, 0] - value]
    if proposals is None:
        mask = None if policy.feature_mask.all() else torch.as_tensor(policy.feature_mask)
        policy.begin_episode(n)

    for t in range(horizon):
        if proposals is None:
            x = torch.cat([
                data.static[:, t, :],
                (value / data.s0).unsqueeze(1),
                shares.unsqueeze(1),
                options.unsqueeze(1),
            ], dim=1)
            out = policy.step(x if mask is None else x[:, mask])
            prop_s = out[:, 0]
            prop_o = out[:, 1] if policy.n_instruments == 2 else torch.zeros_like(prop_s)
        else:
            prop_s = proposals[:, t, 0]
            prop_o = proposals[:, t, 1]

        deviation = (prop_s - shares).abs() + (prop_o - options).abs()
        if hard_gate:
            w = (deviation > threshold).to(dtype)
        else:
            w = torch.sigmoid((deviation - threshold) / temperature)
        new_s = w * prop_s + (1.0 - w) * shares
        new_o = w * prop_o + (1.0 - w) * options

        spot_t = data.spot[:, t]
        opt_t = data.option[:, t]
        paid = config.costs.kappa1 * spot_t * (new_s - shares).abs() \
            + config.costs.kappa2 * opt_t * (new_o - options).abs()
        cash = value - new_s * spot_t - new_o * opt_t - paid
        value = cash * grow_r + new_s * data.spot[:, t + 1] * grow_q \
            + new_o * data.option[:, t + 1]
        shares, options = new_s, new_o
        xi.append(data.straddle[:, t + 1] - value)

    xi_mat = torch.stack(xi, dim=1)
    terminal = xi_mat[:, -1]
    loss = risk_torch(config.penalty.measure, terminal)
    if config.penalty.penalty_lambda > 0:
        if hard_indicator:
            sc = (xi_mat.max(dim=1).values > v0).to(dtype).mean()
        else:
            sc = soft_constraint_torch(xi_mat, v0, config.sc_temperature_scale)
        loss = loss + config.penalty.penalty_lambda * sc
    return loss, terminal, xi_mat


def soft_gate(deviation, threshold, temperature):
    """Blend weight of the trade branch: sigmoid((deviation - l) / temperature)."""
    if np.any(np.asarray(temperature) <= 0):
        raise DomainError("temperature must be positive")
    z = (np.asarray(deviation, dtype=float) - threshold) / temperature
    out = 1.0 / (1.0 + np.exp(-z))
    return out if out.shape else float(out)


def _epoch_temperature(config: TrainConfig, epoch: int) -> float:
    if config.epochs <= 1:
        return config.gate_temperature_end
    frac = epoch / (config.epochs - 1)
    # geometric anneal between the endpoints
    return float(config.gate_temperature_start
                 * (config.gate_temperature_end / config.gate_temperature_start) ** frac)


def evaluate_penalty(policy, data: EpisodeDataset, config: TrainConfig,
                     proposals=None, threshold=None):
    """Hard-gate, hard-indicator penalty plus components, without gradients."""
    was_training = policy.training if hasattr(policy, "training") else False
    if hasattr(policy, "eval"):
        policy.eval()
    with torch.no_grad():
        loss, terminal, xi = episode_loss(
            policy, data, config, temperature=config.gate_temperature_end,
            hard_gate=True, hard_indicator=True, proposals=proposals,
            threshold=threshold)
        sc = float((xi.max(dim=1).values > data.straddle[:, 0]).to(torch.float64).mean())
        risk_val = float(risk_torch(config.penalty.measure, terminal))
    if was_training and hasattr(policy, "train"):
        policy.train()
    return {"penalty": float(loss), "risk": risk_val, "soft_constraint": sc}


def train_policy(policy: RnnFnnPolicy, train_data: EpisodeDataset,
                 valid_data: EpisodeDataset, config: TrainConfig,
                 log_every: int = 0) -> TrainReport:
    """Optimize the network and its threshold on fixed simulated paths.

    The per-step matmuls are small; wide thread pools thrash in the backward
    pass, so the intra-op pool is clamped while training.
    """
    if torch.get_num_threads() > 2:
        torch.set_num_threads(2)
    torch.manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)
    dtype = config.torch_dtype()
    policy.to(dtype)
    policy._dtype = dtype
    policy.dropout_p = config.dropout
    policy.train()

    net_params = [p for name, p in policy.named_parameters() if name != "threshold_raw"]
    optimizer = torch.optim.Adam([
        {"params": net_params, "lr": config.learning_rate},
        {"params": [policy.threshold_raw], "lr": config.threshold_learning_rate},
    ])

    n = len(train_data)
    n_batches = max(n // config.batch_size, 1)
    start = time.perf_counter()
    rows = []
    diverged = False
    for epoch in range(config.epochs):
        temperature = _epoch_temperature(config, epoch)
        order = rng.permutation(n)
        epoch_losses = []
        for b in range(n_batches):
            idx = order[b * config.batch_size:(b + 1) * config.batch_size]
            batch = train_data.slice(torch.as_tensor(idx))
            optimizer.zero_grad()
            loss, _, _ = episode_loss(policy, batch, config, temperature)
            if not torch.isfinite(loss) or float(loss) > config.divergence_limit:
                raise TrainingDiverged(
                    f"penalty {float(loss):g} at epoch {epoch} batch {b} "
                    f"exceeded the divergence guard {config.divergence_limit:g}")
            loss.backward()
            optimizer.step()
            policy.clamp_threshold()
            epoch_losses.append(float(loss))
        valid = evaluate_penalty(policy, valid_data, config)
        rows.append({
            "epoch": epoch,
            "train_penalty": float(np.mean(epoch_losses)),
            "valid_penalty": valid["penalty"],
            "valid_risk": valid["risk"],
            "valid_soft_constraint": valid["soft_constraint"],
            "threshold_l": policy.threshold_l,
            "gate_temperature": temperature,
        })
        if log_every and (epoch + 1) % log_every == 0:
            r = rows[-1]
            print(f"epoch {epoch + 1}/{config.epochs} "
                  f"train {r['train_penalty']:.4f} valid {r['valid_penalty']:.4f} "
                  f"l {r['threshold_l']:.4f}", flush=True)
    policy.eval()
    policy.to(torch.float64)
    policy._dtype = torch.float64
    return TrainReport(epochs=rows, final_threshold=policy.threshold_l,
                       wall_seconds=time.perf_counter() - start, diverged=diverged)


def benchmark_proposals(policy, panels: MarketPanels, dtype=torch.float32) -> torch.Tensor:
    """Precompute a benchmark policy's (position-independent) daily proposals.

    The delta-gamma degenerate-gamma fallback is resolved along the ungated
    book, which matches the gated book except on the vanishing-gamma tail
    days themselves.
    """
    n = panels.n_paths
    horizon = panels.horizon
    out = np.empty((n, horizon, 2))
    policy.reset(n)
    shares = np.zeros(n)
    options = np.zeros(n)
    value = panels.straddle[:, 0].copy()
    for t in range(horizon):
        prop_s, prop_o = policy.propose(t, panels, value, shares, options)
        out[:, t, 0] = prop_s
        out[:, t, 1] = prop_o
        shares, options = prop_s, prop_o
        # value feed is irrelevant for the analytic benchmarks
    return torch.as_tensor(out, dtype=dtype)


def train_threshold(policy, panels: MarketPanels, config: TrainConfig,
                    log_every: int = 0):
    """Optimize the no-trade threshold alone for a fixed benchmark policy.

    Returns (threshold, TrainReport).  The policy's proposals are frozen; the
    gradient flows only through the gate blend.
    """
    torch.manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)
    dtype = config.torch_dtype()
    data = EpisodeDataset(panels, dtype=dtype)
    proposals = benchmark_proposals(policy, panels, dtype=dtype)

    threshold = torch.zeros((), dtype=torch.float64, requires_grad=True)
    optimizer = torch.optim.Adam([threshold], lr=config.threshold_learning_rate)
    n = len(data)
    n_batches = max(n // config.batch_size, 1)
    start = time.perf_counter()
    rows = []
    for epoch in range(config.epochs):
        temperature = _epoch_temperature(config, epoch)
        order = rng.permutation(n)
        losses = []
        for b in range(n_batches):
            idx = torch.as_tensor(order[b * config.batch_size:(b + 1) * config.batch_size])
            batch = data.slice(idx)
            optimizer.zero_grad()
            loss, _, _ = episode_loss(None, batch, config, temperature,
                                      threshold=threshold, proposals=proposals[idx])
            if not torch.isfinite(loss) or float(loss) > config.divergence_limit:
                raise TrainingDiverged(f"penalty {float(loss):g} diverged in threshold run")
            loss.backward()
            optimizer.step()
            with torch.no_grad():
                threshold.clamp_(min=0.0)
            losses.append(float(loss))
        valid = evaluate_penalty(_NullPolicy(), data, config,
                                 proposals=proposals, threshold=threshold)
        rows.append({
            "epoch": epoch, "train_penalty": float(np.mean(losses)),
            "valid_penalty": valid["penalty"], "valid_risk": valid["risk"],
            "valid_soft_constraint": valid["soft_constraint"],
            "threshold_l": float(threshold.clamp(min=0.0)),
            "gate_temperature": temperature,
        })
        if log_every and (epoch + 1) % log_every == 0:
            r = rows[-1]
            print(f"threshold epoch {epoch + 1}/{config.epochs} "
                  f"penalty {r['train_penalty']:.4f} l {r['threshold_l']:.4f}")
    report = TrainReport(epochs=rows, final_threshold=float(threshold.clamp(min=0.0)),
                         wall_seconds=time.perf_counter() - start)
    return report.final_threshold, report


class _NullPolicy:
    training = False

    def eval(self):
        pass

    def train(self):
        pass

"""Hedging decision rules: recurrent neural policy and analytic benchmarks.

The neural policy stacks two recurrent gated cells and two ReLU feedforward
layers over the per-day state features, ending in a linear head that emits
the proposed (shares, options) position.  The cell follows the three-gate
recursion used in this line of work, with the previous hidden output fed back
through every gate:

    i = sigm(W_i [x; h_prev] + b_i)
    o = sigm(W_o [x; h_prev] + b_o)
    c = i * tanh(W_c [x; h_prev] + b_c)
    h = o * tanh(c)

Note there is no forget path: the cell state is recomputed each day from the
gates and only the hidden output persists across days.  This deviates from
the textbook LSTM on purpose, mirroring the printed gate set of the
architecture this follows.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .market import MarketPanels
from .volsurface import DomainError, bs_delta, leland_vol

# Fixed feature order of the policy input.  Scaling: spot and all values are
# divided by the day-0 spot, gamma is multiplied by it, times are in years.
FEATURE_NAMES = (
    "spot", "tau",
    "beta1", "beta2", "beta3", "beta4", "beta5",
    "h1", "h2", "h3", "h4", "h5", "h_r",
    "straddle_value", "straddle_delta", "straddle_gamma",
    "option_value", "portfolio_value", "shares", "options",
)
N_FEATURES = len(FEATURE_NAMES)

_CKPT_MAGIC = b"HLCK"
_CKPT_VERSION = 1

# Hedge-option gamma below this is treated as numerically vanished.
GAMMA_EPS = 1e-12


def feature_order_hash(names=FEATURE_NAMES) -> str:
    return hashlib.sha256(",".join(names).encode()).hexdigest()


def features_from_panels(panels: MarketPanels, day: int, value, shares, options,
                         mask: np.ndarray | None = None) -> np.ndarray:
    """Assemble the (n, 20) feature matrix for one day, then apply the mask."""
    s0 = panels.s0
    n = panels.n_paths
    cols = np.empty((n, N_FEATURES))
    cols[:, 0] = panels.spot[:, day] / s0
    cols[:, 1] = panels.tau[day]
    cols[:, 2:7] = panels.betas[:, day]
    cols[:, 7:12] = panels.h[:, day]
    cols[:, 12] = panels.h_r[:, day]
    cols[:, 13] = panels.straddle[:, day] / s0
    cols[:, 14] = panels.straddle_delta[:, day]
    cols[:, 15] = panels.straddle_gamma[:, day] * s0
    cols[:, 16] = panels.option[:, day] / s0
    cols[:, 17] = np.asarray(value) / s0
    cols[:, 18] = shares
    cols[:, 19] = options
    return cols[:, mask] if mask is not None else cols


class GatedRecurrentCell(nn.Module):
    """Three-gate recurrent cell (input, output, candidate); no forget path.

    The three gate projections are stored as one fused matrix (rows ordered
    input/output/candidate) so each step costs a single matmul; checkpoints
    split them back into per-gate arrays.
    """

    def __init__(self, input_dim: int, width: int):
        super().__init__()
        self.width = width
        self.proj = nn.Linear(input_dim + width, 3 * width)

    def init_glorot(self):
        # per-gate Glorot, matching three independent gate matrices
        w = self.width
        for k in range(3):
            nn.init.xavier_uniform_(self.proj.weight[k * w:(k + 1) * w])
        nn.init.zeros_(self.proj.bias)

    def forward(self, x, hidden):
        z = torch.cat([x, hidden], dim=1)
        g = self.proj(z)
        w = self.width
        gate_i = torch.sigmoid(g[:, :w])
        gate_o = torch.sigmoid(g[:, w:2 * w])
        cell = gate_i * torch.tanh(g[:, 2 * w:])
        return gate_o * torch.tanh(cell)


class RnnFnnPolicy(nn.Module):
    """Recurrent policy network plus the learnable no-trade threshold.

    ``n_instruments`` is 2 for (shares, options) or 1 for an underlying-only
    book (the option output is then pinned at zero).  ``feature_mask`` drops
    state variables for ablation runs.
    """

    def __init__(self, n_instruments: int = 2, width: int = 56, n_cells: int = 2,
                 n_ffnn: int = 2, dropout: float = 0.5,
                 feature_mask: np.ndarray | None = None, seed: int = 0,
                 dtype=torch.float64):
        super().__init__()
        if n_instruments not in (1, 2):
            raise DomainError("n_instruments must be 1 or 2")
        if feature_mask is None:
            feature_mask = np.ones(N_FEATURES, dtype=bool)
        feature_mask = np.asarray(feature_mask, dtype=bool)
        if feature_mask.shape != (N_FEATURES,):
            raise DomainError(f"feature mask must have shape ({N_FEATURES},)")
        self.n_instruments = n_instruments
        self.width = width
        self.n_cells = n_cells
        self.n_ffnn = n_ffnn
        self.dropout_p = dropout
        self.feature_mask = feature_mask
        in_dim = int(feature_mask.sum())
        self.input_dim = in_dim

        torch.manual_seed(seed)
        cells = []
        d = in_dim
        for _ in range(n_cells):
            cells.append(GatedRecurrentCell(d, width))
            d = width
        self.cells = nn.ModuleList(cells)
        ffnn = []
        for _ in range(n_ffnn):
            ffnn.append(nn.Linear(d, width))
            d = width
        self.ffnn = nn.ModuleList(ffnn)
        self.head = nn.Linear(d, n_instruments)
        self.threshold_raw = nn.Parameter(torch.zeros((), dtype=torch.float64))
        self._init_weights()
        self.to(dtype)
        self._dtype = dtype
        self._hidden = None

    def _init_weights(self):
        for module in self.modules():
            if isinstance(module, GatedRecurrentCell):
                module.init_glorot()
        for module in (*self.ffnn, self.head):
            nn.init.xavier_uniform_(module.weight)
            nn.init.zeros_(module.bias)

    @property
    def threshold_l(self) -> float:
        return float(self.threshold_raw.clamp(min=0.0))

    def clamp_threshold(self):
        with torch.no_grad():
            self.threshold_raw.clamp_(min=0.0)

    def begin_episode(self, n_paths: int, device=None):
        self._hidden = [
            torch.zeros(n_paths, self.width, dtype=self._dtype, device=device)
            for _ in range(self.n_cells)
        ]

    def step(self, x: torch.Tensor) -> torch.Tensor:
        """One day's forward pass; carries hidden state across calls."""
        if self._hidden is None or self._hidden[0].shape[0] != x.shape[0]:
            raise DomainError("call begin_episode(n_paths) before stepping")
        z = x
        for k, cell in enumerate(self.cells):
            h = cell(z, self._hidden[k])
            self._hidden[k] = h
            z = h
        for layer in self.ffnn:
            z = torch.relu(layer(z))
            if self.training and self.dropout_p > 0:
                z = torch.nn.functional.dropout(z, p=self.dropout_p, training=True)
        return self.head(z)

    def forward(self, feature_sequence: torch.Tensor) -> torch.Tensor:
        """Evaluate a whole (T, n, features) sequence; returns (T, n, outputs)."""
        self.begin_episode(feature_sequence.shape[1], device=feature_sequence.device)
        return torch.stack([self.step(feature_sequence[t]) for t in range(feature_sequence.shape[0])])

    # -- episode-engine adapter (numpy in, numpy out, hard gate handled by engine)

    def reset(self, n_paths: int):
        self.begin_episode(n_paths)

    def propose(self, day, panels, value, shares, options):
        feats = features_from_panels(panels, day, value, shares, options, self.feature_mask)
        was_training = self.training
        self.eval()
        with torch.no_grad():
            out = self.step(torch.as_tensor(feats, dtype=self._dtype)).numpy()
        if was_training:
            self.train()
        prop_s = out[:, 0]
        prop_o = out[:, 1] if self.n_instruments == 2 else np.zeros_like(prop_s)
        return prop_s, prop_o

    # -- checkpointing -------------------------------------------------------

    def _checkpoint_arrays(self) -> dict:
        """Parameter arrays with fused gate projections split per gate."""
        arrays = {}
        for name, p in self.named_parameters():
            arr = p.detach().cpu().numpy().astype(np.float64)
            if ".proj." in name:
                w = self.width
                stem, kind = name.rsplit(".proj.", 1)
                for k, gate in enumerate(("input", "output", "cell")):
                    arrays[f"{stem}.gate_{gate}.{kind}"] = arr[k * w:(k + 1) * w]
            else:
                arrays[name] = arr
        return arrays

    def _load_checkpoint_arrays(self, arrays: dict):
        state = {}
        for name, p in self.named_parameters():
            if ".proj." in name:
                stem, kind = name.rsplit(".proj.", 1)
                parts = [arrays[f"{stem}.gate_{gate}.{kind}"]
                         for gate in ("input", "output", "cell")]
                state[name] = torch.as_tensor(np.concatenate(parts, axis=0))
            else:
                state[name] = torch.as_tensor(arrays[name])
        self.load_state_dict(state)

    def save_checkpoint(self, path):
        """Versioned flat binary of all arrays plus a JSON sidecar."""
        path = Path(path)
        arrays = self._checkpoint_arrays()
        with open(path, "wb") as fh:
            fh.write(_CKPT_MAGIC)
            fh.write(struct.pack("<II", _CKPT_VERSION, len(arrays)))
            for name, arr in sorted(arrays.items()):
                blob = name.encode()
                fh.write(struct.pack("<H", len(blob)))
                fh.write(blob)
                fh.write(struct.pack("<B", arr.ndim))
                fh.write(struct.pack(f"<{max(arr.ndim, 1)}Q", *(arr.shape or (1,))))
                fh.write(np.ascontiguousarray(arr).tobytes())
        sidecar = {
            "format_version": _CKPT_VERSION,
            "shapes": {name: list(arr.shape) for name, arr in sorted(arrays.items())},
            "feature_names": [n for n, keep in zip(FEATURE_NAMES, self.feature_mask) if keep],
            "feature_order_hash": feature_order_hash(
                tuple(n for n, keep in zip(FEATURE_NAMES, self.feature_mask) if keep)),
            "feature_mask": self.feature_mask.astype(int).tolist(),
            "n_instruments": self.n_instruments,
            "width": self.width,
            "n_cells": self.n_cells,
            "n_ffnn": self.n_ffnn,
            "dropout": self.dropout_p,
            "threshold_l": self.threshold_l,
        }
        path.with_suffix(path.suffix + ".json").write_text(json.dumps(sidecar, indent=2))

    @classmethod
    def load_checkpoint(cls, path) -> "RnnFnnPolicy":
        path = Path(path)
        meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
        policy = cls(
            n_instruments=meta["n_instruments"], width=meta["width"],
            n_cells=meta["n_cells"], n_ffnn=meta["n_ffnn"], dropout=meta["dropout"],
            feature_mask=np.array(meta["feature_mask"], dtype=bool),
        )
        expected_hash = feature_order_hash(tuple(meta["feature_names"]))
        if meta["feature_order_hash"] != expected_hash:
            raise ValueError("checkpoint feature-order hash mismatch")
        arrays = {}
        with open(path, "rb") as fh:
            if fh.read(4) != _CKPT_MAGIC:
                raise ValueError("not a policy checkpoint")
            version, n_arrays = struct.unpack("<II", fh.read(8))
            if version != _CKPT_VERSION:
                raise ValueError(f"unsupported checkpoint version {version}")
            for _ in range(n_arrays):
                (name_len,) = struct.unpack("<H", fh.read(2))
                name = fh.read(name_len).decode()
                (ndim,) = struct.unpack("<B", fh.read(1))
                shape = struct.unpack(f"<{max(ndim, 1)}Q", fh.read(8 * max(ndim, 1)))
                if ndim == 0:
                    shape = ()
                count = int(np.prod(shape)) if shape else 1
                arrays[name] = np.frombuffer(fh.read(8 * count), dtype=np.float64).reshape(shape)
        policy._load_checkpoint_arrays(arrays)
        policy.eval()
        return policy


class LelandDeltaPolicy:
    """Straddle delta with cost-adjusted volatility; trades the underlying only.

    Both straddle legs use the same adjusted volatility; the position is the
    sum of the adjusted call and put deltas.  With kappa == 0 this is the
    plain practitioner straddle delta.
    """

    def __init__(self, kappa: float = 0.0, rebalance_interval: float = 1.0 / 252.0):
        if kappa < 0:
            raise DomainError("kappa must be nonnegative")
        self.kappa = kappa
        self.rebalance_interval = rebalance_interval
        self.threshold_l = 0.0

    def reset(self, n_paths: int):
        pass

    def propose(self, day, panels: MarketPanels, value, shares, options):
        tau = panels.tau[day]
        if tau <= 0:
            raise DomainError("Leland delta is undefined at expiry")
        iv = panels.straddle_iv[:, day]
        vol = leland_vol(iv, self.kappa, self.rebalance_interval) if self.kappa > 0 else iv
        kw = dict(spot=panels.spot[:, day], strike=panels.hedged.strike, tau=tau,
                  rate=panels.rate, dividend=panels.dividend, vol=vol)
        prop_s = bs_delta(kind="call", **kw) + bs_delta(kind="put", **kw)
        return prop_s, np.zeros_like(prop_s)


def leland_policy(spot, strike, tau, rate, dividend, surface_iv, kappa,
                  rebalance_interval=1.0 / 252.0):
    """Single-state Leland proposal: (shares, 0) for the straddle book."""
    if np.any(np.asarray(tau) <= 0):
        raise DomainError("Leland delta is undefined at expiry")
    vol = leland_vol(surface_iv, kappa, rebalance_interval) if kappa > 0 else surface_iv
    kw = dict(spot=spot, strike=strike, tau=tau, rate=rate, dividend=dividend, vol=vol)
    shares = bs_delta(kind="call", **kw) + bs_delta(kind="put", **kw)
    return shares, np.zeros_like(np.asarray(shares, dtype=float)) if np.ndim(shares) else 0.0


class DeltaGammaPolicy:
    """Gamma-matching book: options = straddle gamma over option gamma.

    When the hedge option's gamma has numerically vanished (deep ITM/OTM tail
    states) the ratio is undefined; the book then keeps its option leg and
    delta-hedges the remainder with shares.  The single-state operation
    ``delta_gamma_policy`` raises instead, reporting the degeneracy.
    """

    def __init__(self):
        self.threshold_l = 0.0

    def reset(self, n_paths: int):
        pass

    def propose(self, day, panels: MarketPanels, value, shares, options):
        gamma_p = panels.straddle_gamma[:, day]
        gamma_o = panels.option_gamma[:, day]
        degenerate = gamma_o < GAMMA_EPS
        prop_o = np.where(degenerate, options, gamma_p / np.where(degenerate, 1.0, gamma_o))
        prop_s = panels.straddle_delta[:, day] - prop_o * panels.option_delta[:, day]
        return prop_s, prop_o


def delta_gamma_policy(delta_p, gamma_p, delta_o, gamma_o):
    """Single-state delta-gamma proposal; raises on vanishing option gamma."""
    if np.any(np.abs(np.asarray(gamma_o)) < GAMMA_EPS):
        raise DomainError("hedge-option gamma vanished; delta-gamma system is degenerate")
    options = np.asarray(gamma_p, dtype=float) / np.asarray(gamma_o, dtype=float)
    shares = np.asarray(delta_p, dtype=float) - options * np.asarray(delta_o, dtype=float)
    if np.ndim(options) == 0:
        return float(shares), float(options)
    return shares, options


class GatedPolicy:
    """Wrap any policy with a no-trade threshold consumed by the episode engine."""

    def __init__(self, inner, threshold_l: float):
        if threshold_l < 0:
            raise DomainError("no-trade threshold must be nonnegative")
        self.inner = inner
        self.threshold_l = float(threshold_l)

    def reset(self, n_paths: int):
        self.inner.reset(n_paths)

    def propose(self, day, panels, value, shares, options):
        return self.inner.propose(day, panels, value, shares, options)

    def apply_gate(self, proposal, previous):
        """Keep-or-trade rule: returns the proposal only beyond the threshold."""
        prop_s, prop_o = np.asarray(proposal[0]), np.asarray(proposal[1])
        prev_s, prev_o = np.asarray(previous[0]), np.asarray(previous[1])
        deviation = np.abs(prop_s - prev_s) + np.abs(prop_o - prev_o)
        trade = deviation > self.threshold_l
        return np.where(trade, prop_s, prev_s), np.where(trade, prop_o, prev_o)


def gated(policy, threshold_l: float) -> GatedPolicy:
    return GatedPolicy(policy, threshold_l)


class ConstantPolicy:
    """Fixed positions every day; handy for degenerate checks."""

    def __init__(self, shares: float = 0.0, options: float = 0.0):
        self.shares = shares
        self.options = options
        self.threshold_l = 0.0

    def reset(self, n_paths: int):
        self._n = n_paths

    def propose(self, day, panels, value, shares, options):
        n = panels.n_paths
        return np.full(n, self.shares), np.full(n, self.options)

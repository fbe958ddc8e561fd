"""Joint daily dynamics of the equity price and its IV-surface factors.

One step advances (spot, beta, variances) by one trading day:

1. variance recursions driven by the previous day's innovations, with the
   return variance anchored to the squared scaled one-month ATM IV and each
   factor variance anchored to its own level (factor 1 shares the IV anchor);
2. affine factor updates plus the extra one-day lag on factor 2;
3. the excess return from the equity-premium/convexity-correction identity;
4. spot compounding at (rate - dividend) plus the excess return.

Variances are floored at ``H_FLOOR`` and capped (returns at ``cap_h_r``,
factors at ``cap_h_mult`` times their anchors).  The caps keep the recursions
inside the cgf convergence strip and bound the heavy-tailed factor-variance
processes, whose squared-multiplier expectation exceeds one for factor 2.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np

from .stochastics import CopulaSpec, GaussianCopula, NigDistribution, NigParams
from .volsurface import DomainError, surface_vol

DT = 1.0 / 252.0
H_FLOOR = 1e-8

_PATHSET_MAGIC = b"HLPS"
_PATHSET_VERSION = 1

# Innovation channel order everywhere: (return, factor1..factor5).
CHANNELS = ("eps_r", "eps_1", "eps_2", "eps_3", "eps_4", "eps_5")


@dataclass(frozen=True)
class JivrParams:
    """Model parameters: return block, factor blocks, copula, and guards."""

    equity_premium_lambda: float
    kappa_r: float
    gamma_r: float
    a_r: float
    omega_r: float
    nig_r: NigParams
    alpha: np.ndarray          # (5,) intercepts
    theta: np.ndarray          # (5, 5) lag matrix; theta[i, j] multiplies beta_j in eq. i
    nu: float                  # extra beta2 lag coefficient
    sigma: np.ndarray          # (5,) anchor vols (annualized); sigma[0] unused (factor 1 uses omega_1)
    omega_1: float
    kappa: np.ndarray          # (5,) variance mean-reversion speeds
    a: np.ndarray              # (5,) variance innovation loadings
    gamma: np.ndarray          # (5,) variance leverage parameters
    nig: tuple                 # five NigParams
    copula: CopulaSpec
    delta_t: float = DT
    rate: float = 0.0266
    dividend: float = 0.0177
    cap_h_r: float = 1.0       # annualized-variance cap on the return channel
    cap_h_mult: float = 2.0    # factor variances capped at this multiple of their anchors

    def __post_init__(self):
        for name in ("alpha", "sigma", "kappa", "a", "gamma"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))
        if np.any((self.kappa < 0) | (self.kappa >= 1)) or not (0 <= self.kappa_r < 1):
            raise DomainError("variance mean-reversion speeds must lie in [0, 1)")
        if np.any(self.a < 0) or self.a_r < 0:
            raise DomainError("variance innovation loadings must be nonnegative")

    def factor_anchor_sq(self) -> np.ndarray:
        """Constant variance anchors for factors 2..5 (index 0 is a placeholder)."""
        out = self.sigma**2
        out[0] = np.nan
        return out

    def beta_fixed_point(self) -> np.ndarray:
        """Fixed point of the deterministic affine factor map."""
        a_mat = self.theta.copy()
        a_mat[1, 1] += self.nu
        return np.linalg.solve(np.eye(5) - a_mat, self.alpha)


def default_params(**overrides) -> JivrParams:
    """Compiled-in parameter tables for the S&P 500 joint model."""
    base = dict(
        equity_premium_lambda=2.711279,
        kappa_r=0.888977,
        gamma_r=2.507796,
        a_r=0.056087,
        omega_r=0.977291,
        nig_r=NigParams(zeta=-0.641306, varphi=2.039669),
        alpha=np.array([0.000899, 0.008400, 0.000770, -0.001393, 0.000657]),
        theta=np.array([
            [0.996290, 0.003669, 0.0, 0.0, 0.0],
            [-0.013869, 0.877813, -0.032640, 0.0, -0.047789],
            [0.0, 0.001300, 0.997071, 0.0, 0.0],
            [0.002841, 0.0, 0.003722, 0.980269, 0.0],
            [0.0, 0.0, -0.004198, 0.0, 0.986019],
        ]),
        nu=0.089445,
        sigma=np.array([np.nan, 0.380279, 0.052198, 0.048641, 0.051536]),
        omega_1=0.267589,
        kappa=np.array([0.838220, 0.965751, 0.974251, 0.945377, 0.980844]),
        a=np.array([0.134152, 0.098272, 0.092646, 0.102201, 0.100502]),
        gamma=np.array([-0.111813, -1.482862, 0.096766, 0.060558, -0.102996]),
        nig=(
            NigParams(zeta=0.143760, varphi=1.351070),
            NigParams(zeta=0.852943, varphi=1.538928),
            NigParams(zeta=0.029109, varphi=2.284780),
            NigParams(zeta=-0.159051, varphi=1.449977),
            NigParams(zeta=0.092664, varphi=1.428477),
        ),
        copula=CopulaSpec(np.array([
            [1.000, -0.550, -0.690, 0.030, -0.220, -0.340],
            [-0.550, 1.000, 0.140, -0.030, 0.250, 0.170],
            [-0.690, 0.140, 1.000, -0.010, 0.120, 0.370],
            [0.030, -0.030, -0.010, 1.000, 0.280, 0.130],
            [-0.220, 0.250, 0.120, 0.280, 1.000, -0.050],
            [-0.340, 0.170, 0.370, 0.130, -0.050, 1.000],
        ])),
    )
    base.update(overrides)
    return JivrParams(**base)


def params_from_file(path, **overrides) -> JivrParams:
    """Build parameters from a key-value text file layered over the defaults.

    Recognized keys mirror the parameter tables, e.g. ``lambda``, ``kappa_r``,
    ``alpha_2``, ``theta_2_5``, ``sigma_3``, ``zeta_r``, ``varphi_4``,
    ``corr_r_1``, ``corr_2_5``, ``nu``, ``omega_1``, ``omega_r``.
    """
    from .stochastics import load_key_value_params

    kv = load_key_value_params(path)
    p = default_params()
    alpha = p.alpha.copy()
    theta = p.theta.copy()
    sigma = p.sigma.copy()
    kappa = p.kappa.copy()
    a = p.a.copy()
    gamma = p.gamma.copy()
    nig = {i: [p.nig[i].zeta, p.nig[i].varphi] for i in range(5)}
    nig_r = [p.nig_r.zeta, p.nig_r.varphi]
    corr = p.copula.corr.copy()
    scalars = dict(
        equity_premium_lambda=p.equity_premium_lambda, kappa_r=p.kappa_r,
        gamma_r=p.gamma_r, a_r=p.a_r, omega_r=p.omega_r, nu=p.nu,
        omega_1=p.omega_1, rate=p.rate, dividend=p.dividend,
        cap_h_r=p.cap_h_r, cap_h_mult=p.cap_h_mult,
    )
    chan = {"r": 0, "1": 1, "2": 2, "3": 3, "4": 4, "5": 5}
    for key, val in kv.items():
        parts = key.lower().split("_")
        if key.lower() == "lambda":
            scalars["equity_premium_lambda"] = val
        elif key.lower() in scalars:
            scalars[key.lower()] = val
        elif parts[0] == "alpha" and len(parts) == 2:
            alpha[int(parts[1]) - 1] = val
        elif parts[0] == "theta" and len(parts) == 3:
            theta[int(parts[1]) - 1, int(parts[2]) - 1] = val
        elif parts[0] == "sigma" and len(parts) == 2:
            sigma[int(parts[1]) - 1] = val
        elif parts[0] == "kappa" and len(parts) == 2 and parts[1] != "r":
            kappa[int(parts[1]) - 1] = val
        elif parts[0] == "a" and len(parts) == 2 and parts[1] != "r":
            a[int(parts[1]) - 1] = val
        elif parts[0] == "gamma" and len(parts) == 2 and parts[1] != "r":
            gamma[int(parts[1]) - 1] = val
        elif parts[0] == "zeta" and len(parts) == 2:
            if parts[1] == "r":
                nig_r[0] = val
            else:
                nig[int(parts[1]) - 1][0] = val
        elif parts[0] == "varphi" and len(parts) == 2:
            if parts[1] == "r":
                nig_r[1] = val
            else:
                nig[int(parts[1]) - 1][1] = val
        elif parts[0] == "corr" and len(parts) == 3:
            i, j = chan[parts[1]], chan[parts[2]]
            corr[i, j] = corr[j, i] = val
        else:
            raise ValueError(f"unrecognized parameter key {key!r}")
    built = default_params(
        alpha=alpha, theta=theta, sigma=sigma, kappa=kappa, a=a, gamma=gamma,
        nig=tuple(NigParams(zeta=z, varphi=v) for z, v in (nig[i] for i in range(5))),
        nig_r=NigParams(zeta=nig_r[0], varphi=nig_r[1]),
        copula=CopulaSpec(corr), **scalars,
    )
    return replace(built, **overrides) if overrides else built


@dataclass
class MarketState:
    """Simulator state for a batch of paths (arrays share leading axis)."""

    spot: np.ndarray           # (n,)
    betas: np.ndarray          # (n, 5)
    h_r: np.ndarray            # (n,)
    h: np.ndarray              # (n, 5)
    prev_beta2: np.ndarray     # (n,)  beta2 lagged one extra day
    prev_eps: np.ndarray       # (n, 6) innovations that produced this state

    @classmethod
    def single(cls, spot, betas, h_r, h, prev_beta2=None, prev_eps=None):
        betas = np.atleast_2d(np.asarray(betas, dtype=float))
        h = np.atleast_2d(np.asarray(h, dtype=float))
        if prev_beta2 is None:
            prev_beta2 = betas[:, 1]
        return cls(
            spot=np.atleast_1d(float(spot)), betas=betas,
            h_r=np.atleast_1d(float(h_r)), h=h,
            prev_beta2=np.atleast_1d(prev_beta2).astype(float),
            prev_eps=np.zeros((1, 6)) if prev_eps is None else np.atleast_2d(prev_eps),
        )

    def __len__(self):
        return len(self.spot)

    def take(self, idx) -> "MarketState":
        return MarketState(
            spot=self.spot[idx].copy(), betas=self.betas[idx].copy(),
            h_r=self.h_r[idx].copy(), h=self.h[idx].copy(),
            prev_beta2=self.prev_beta2[idx].copy(), prev_eps=self.prev_eps[idx].copy(),
        )

    def validate(self):
        if np.any(self.spot <= 0):
            raise DomainError("spot must be positive")
        if np.any(self.h_r < 0) or np.any(self.h < 0):
            raise DomainError("variances must be nonnegative")


def equity_premium(h_next, lam, cgf):
    """Daily excess-return drift: psi(-lam s) - psi((1-lam) s) + psi(s), s = sqrt(h dt)."""
    h_next = np.asarray(h_next, dtype=float)
    if np.any(h_next < 0):
        raise DomainError("equity_premium requires h >= 0")
    s = np.sqrt(h_next * DT)
    out = cgf(-lam * s) - cgf((1.0 - lam) * s) + cgf(s)
    return out if np.ndim(out) else float(out)


def step(state: MarketState, params: JivrParams, innovations: np.ndarray,
         nig_r: NigDistribution | None = None) -> MarketState:
    """Advance one trading day.  ``innovations`` has shape (n, 6)."""
    innovations = np.atleast_2d(np.asarray(innovations, dtype=float))
    if innovations.shape != (len(state), 6):
        raise DomainError(f"innovations shape {innovations.shape} != ({len(state)}, 6)")
    if nig_r is None:
        nig_r = NigDistribution(params.nig_r)

    iv_1m = surface_vol(state.betas, 0.0, 1.0 / 12.0)
    y_anchor = (params.omega_r * iv_1m) ** 2
    u_anchor = (params.omega_1 * iv_1m) ** 2

    e = state.prev_eps
    h_r_next = np.clip(
        y_anchor + params.kappa_r * (state.h_r - y_anchor)
        + params.a_r * state.h_r * (e[:, 0] ** 2 - 1.0 - 2.0 * params.gamma_r * e[:, 0]),
        H_FLOOR, params.cap_h_r,
    )
    h_next = np.empty_like(state.h)
    anchor_sq = params.factor_anchor_sq()
    for i in range(5):
        anchor = u_anchor if i == 0 else anchor_sq[i]
        cap = params.cap_h_mult * anchor
        h_next[:, i] = np.clip(
            anchor + params.kappa[i] * (state.h[:, i] - anchor)
            + params.a[i] * state.h[:, i]
            * (e[:, i + 1] ** 2 - 1.0 - 2.0 * params.gamma[i] * e[:, i + 1]),
            H_FLOOR, cap,
        )

    betas_next = params.alpha[None, :] + state.betas @ params.theta.T
    betas_next[:, 1] += params.nu * state.prev_beta2
    betas_next += innovations[:, 1:] * np.sqrt(h_next * DT)

    s_dt = np.sqrt(h_r_next * DT)
    premium = nig_r.cgf(-params.equity_premium_lambda * s_dt) \
        - nig_r.cgf((1.0 - params.equity_premium_lambda) * s_dt) + nig_r.cgf(s_dt)
    log_excess = premium - nig_r.cgf(s_dt) + s_dt * innovations[:, 0]
    spot_next = state.spot * np.exp((params.rate - params.dividend) * DT + log_excess)

    return MarketState(
        spot=spot_next, betas=betas_next, h_r=h_r_next, h=h_next,
        prev_beta2=state.betas[:, 1].copy(), prev_eps=innovations.copy(),
    )


@dataclass
class PathSet:
    """Rectangular batch of simulated paths: per-day market states."""

    spot: np.ndarray       # (n, T+1)
    betas: np.ndarray      # (n, T+1, 5)
    h_r: np.ndarray        # (n, T+1)
    h: np.ndarray          # (n, T+1, 5)
    prev_beta2: np.ndarray | None = None   # (n, T+1) when full state kept
    eps: np.ndarray | None = None          # (n, T+1, 6) innovations producing each day

    @property
    def n_paths(self) -> int:
        return self.spot.shape[0]

    @property
    def horizon_days(self) -> int:
        return self.spot.shape[1] - 1

    def state_at(self, day: int, paths=None) -> MarketState:
        """Resumable state at ``day``; requires the full-state arrays."""
        if self.prev_beta2 is None or self.eps is None:
            raise DomainError("PathSet was simulated without keep_full_state=True")
        sel = slice(None) if paths is None else paths
        return MarketState(
            spot=self.spot[sel, day].copy(), betas=self.betas[sel, day].copy(),
            h_r=self.h_r[sel, day].copy(), h=self.h[sel, day].copy(),
            prev_beta2=self.prev_beta2[sel, day].copy(), prev_eps=self.eps[sel, day].copy(),
        )

    def save_binary(self, path):
        """Flat binary layout: header (counts, field order), then row-major doubles."""
        fields = ["spot", "beta1", "beta2", "beta3", "beta4", "beta5",
                  "h_r", "h1", "h2", "h3", "h4", "h5"]
        body = np.concatenate(
            [self.spot[:, :, None], self.betas, self.h_r[:, :, None], self.h], axis=2
        ).astype(np.float64)
        with open(path, "wb") as fh:
            fh.write(_PATHSET_MAGIC)
            fh.write(struct.pack("<IQQI", _PATHSET_VERSION, self.n_paths,
                                 self.horizon_days, len(fields)))
            field_blob = ",".join(fields).encode()
            fh.write(struct.pack("<I", len(field_blob)))
            fh.write(field_blob)
            fh.write(body.tobytes(order="C"))

    @classmethod
    def load_binary(cls, path) -> "PathSet":
        with open(path, "rb") as fh:
            magic = fh.read(4)
            if magic != _PATHSET_MAGIC:
                raise ValueError(f"not a PathSet file: bad magic {magic!r}")
            version, n_paths, horizon, n_fields = struct.unpack("<IQQI", fh.read(24))
            if version != _PATHSET_VERSION:
                raise ValueError(f"unsupported PathSet version {version}")
            (blob_len,) = struct.unpack("<I", fh.read(4))
            fields = fh.read(blob_len).decode().split(",")
            if len(fields) != n_fields:
                raise ValueError("corrupt PathSet header")
            body = np.frombuffer(fh.read(), dtype=np.float64)
        body = body.reshape(n_paths, horizon + 1, n_fields)
        return cls(
            spot=body[:, :, 0].copy(), betas=body[:, :, 1:6].copy(),
            h_r=body[:, :, 6].copy(), h=body[:, :, 7:12].copy(),
        )

    def to_csv(self, path):
        import pandas as pd

        n, t1 = self.spot.shape
        frame = pd.DataFrame({
            "path": np.repeat(np.arange(n), t1),
            "day": np.tile(np.arange(t1), n),
            "spot": self.spot.ravel(),
            **{f"beta{i+1}": self.betas[:, :, i].ravel() for i in range(5)},
            "h_r": self.h_r.ravel(),
            **{f"h{i+1}": self.h[:, :, i].ravel() for i in range(5)},
        })
        frame.to_csv(path, index=False, float_format="%.17g")


@dataclass
class InitialStatePool:
    """Pool of (beta, variance) states from which episodes draw day-0 conditions."""

    betas: np.ndarray          # (m, 5)
    h_r: np.ndarray            # (m,)
    h: np.ndarray              # (m, 5)
    prev_beta2: np.ndarray     # (m,)
    prev_eps: np.ndarray       # (m, 6)

    def __post_init__(self):
        if len(self.betas) == 0:
            raise DomainError("initial-state pool is empty")

    def __len__(self):
        return len(self.h_r)

    def draw(self, idx, spot0: float) -> MarketState:
        return MarketState(
            spot=np.full(len(idx), float(spot0)),
            betas=self.betas[idx].copy(), h_r=self.h_r[idx].copy(), h=self.h[idx].copy(),
            prev_beta2=self.prev_beta2[idx].copy(), prev_eps=self.prev_eps[idx].copy(),
        )

    def to_csv(self, path):
        import pandas as pd

        pd.DataFrame({
            **{f"beta{i+1}": self.betas[:, i] for i in range(5)},
            "h_r": self.h_r,
            **{f"h{i+1}": self.h[:, i] for i in range(5)},
        }).to_csv(path, index=False, float_format="%.17g")

    @classmethod
    def from_csv(cls, path) -> "InitialStatePool":
        """Ingest a user-supplied pool (columns beta1..beta5, h_r, h1..h5).

        The extra lag state is seeded with beta2 itself and the previous-day
        innovations with zero, matching the day-0 conventions of the model.
        """
        import pandas as pd

        frame = pd.read_csv(path)
        required = [f"beta{i}" for i in range(1, 6)] + ["h_r"] + [f"h{i}" for i in range(1, 6)]
        missing = [c for c in required if c not in frame.columns]
        if missing:
            raise ValueError(f"pool CSV {path} is missing columns: {missing}")
        betas = frame[[f"beta{i}" for i in range(1, 6)]].to_numpy(dtype=float)
        h = frame[[f"h{i}" for i in range(1, 6)]].to_numpy(dtype=float)
        m = len(frame)
        return cls(
            betas=betas, h_r=frame["h_r"].to_numpy(dtype=float), h=h,
            prev_beta2=betas[:, 1].copy(), prev_eps=np.zeros((m, 6)),
        )


def _path_rng(seed: int, path_index: int) -> np.random.Generator:
    """Counter-based per-path stream so path i is reproducible in isolation."""
    key = np.array([seed, path_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _draw_path_normals(seed: int, path_indices, horizon: int) -> np.ndarray:
    out = np.empty((len(path_indices), horizon, 6))
    for row, pidx in enumerate(path_indices):
        out[row] = _path_rng(seed, int(pidx)).standard_normal((horizon, 6))
    return out


def _draw_pool_indices(seed: int, path_indices, pool_size: int) -> np.ndarray:
    # separate sub-stream (second key word offset) so normals stay aligned
    out = np.empty(len(path_indices), dtype=np.int64)
    for row, pidx in enumerate(path_indices):
        rng = np.random.Generator(np.random.Philox(key=np.array(
            [seed ^ 0x9E3779B97F4A7C15, int(pidx)], dtype=np.uint64)))
        out[row] = rng.integers(0, pool_size)
    return out


def synthetic_pool(params: JivrParams | None = None, n_chains: int = 64,
                   n_days: int = 4000, burn_in: int = 3000, seed: int = 7,
                   spot0: float = 100.0) -> InitialStatePool:
    """Stationary-state pool from long simulated chains started at the fixed point.

    Stand-in for the historical daily estimates that seed the experiments in
    the source setting; those series are not distributable.
    """
    params = params or default_params()
    nig_r = NigDistribution(params.nig_r)
    copula = GaussianCopula(params.copula, [params.nig_r, *params.nig])

    beta0 = params.beta_fixed_point()
    iv = surface_vol(beta0, 0.0, 1.0 / 12.0)
    anchor_sq = params.factor_anchor_sq()
    h0 = np.array([(params.omega_1 * iv) ** 2, *anchor_sq[1:]])
    state = MarketState(
        spot=np.full(n_chains, spot0),
        betas=np.tile(beta0, (n_chains, 1)),
        h_r=np.full(n_chains, (params.omega_r * iv) ** 2),
        h=np.tile(h0, (n_chains, 1)),
        prev_beta2=np.full(n_chains, beta0[1]),
        prev_eps=np.zeros((n_chains, 6)),
    )
    rng = _path_rng(seed, 0)
    keep_betas, keep_hr, keep_h, keep_pb2, keep_eps = [], [], [], [], []
    for day in range(burn_in + n_days):
        eps = copula.sample_from_normals(rng.standard_normal((n_chains, 6)))
        state = step(state, params, eps, nig_r=nig_r)
        if day >= burn_in:
            keep_betas.append(state.betas.copy())
            keep_hr.append(state.h_r.copy())
            keep_h.append(state.h.copy())
            keep_pb2.append(state.prev_beta2.copy())
            keep_eps.append(state.prev_eps.copy())
    return InitialStatePool(
        betas=np.concatenate(keep_betas), h_r=np.concatenate(keep_hr),
        h=np.concatenate(keep_h), prev_beta2=np.concatenate(keep_pb2),
        prev_eps=np.concatenate(keep_eps),
    )


def simulate_from_states(params: JivrParams, init: MarketState, horizon_days: int,
                         seed: int, path_offset: int = 0,
                         keep_full_state: bool = False) -> PathSet:
    """Simulate forward from given day-0 states, one stream per path index."""
    n = len(init)
    nig_r = NigDistribution(params.nig_r)
    copula = GaussianCopula(params.copula, [params.nig_r, *params.nig])

    spot = np.empty((n, horizon_days + 1))
    betas = np.empty((n, horizon_days + 1, 5))
    h_r = np.empty((n, horizon_days + 1))
    h = np.empty((n, horizon_days + 1, 5))
    pb2 = np.empty((n, horizon_days + 1)) if keep_full_state else None
    eps_hist = np.empty((n, horizon_days + 1, 6)) if keep_full_state else None

    state = init
    spot[:, 0] = state.spot
    betas[:, 0] = state.betas
    h_r[:, 0] = state.h_r
    h[:, 0] = state.h
    if keep_full_state:
        pb2[:, 0] = state.prev_beta2
        eps_hist[:, 0] = state.prev_eps

    if horizon_days > 0:
        normals = _draw_path_normals(seed, np.arange(path_offset, path_offset + n), horizon_days)
        for t in range(horizon_days):
            eps = copula.sample_from_normals(np.ascontiguousarray(normals[:, t, :]))
            state = step(state, params, eps, nig_r=nig_r)
            spot[:, t + 1] = state.spot
            betas[:, t + 1] = state.betas
            h_r[:, t + 1] = state.h_r
            h[:, t + 1] = state.h
            if keep_full_state:
                pb2[:, t + 1] = state.prev_beta2
                eps_hist[:, t + 1] = state.prev_eps
    return PathSet(spot=spot, betas=betas, h_r=h_r, h=h, prev_beta2=pb2, eps=eps_hist)


def simulate(params: JivrParams, pool: InitialStatePool, n_paths: int,
             horizon_days: int, seed: int, spot0: float = 100.0,
             path_offset: int = 0, keep_full_state: bool = False) -> PathSet:
    """Draw initial states uniformly from ``pool`` and simulate forward.

    Deterministic per (seed, path index): each path owns a counter-based
    stream, so results do not depend on chunking or scheduling.
    """
    if len(pool) == 0:
        raise DomainError("initial-state pool is empty")
    path_ids = np.arange(path_offset, path_offset + n_paths)
    idx = _draw_pool_indices(seed, path_ids, len(pool))
    init = pool.draw(idx, spot0)
    return simulate_from_states(params, init, horizon_days, seed,
                                path_offset=path_offset, keep_full_state=keep_full_state)


def simulate_chunked(params: JivrParams, pool: InitialStatePool, n_paths: int,
                     horizon_days: int, seed: int, spot0: float = 100.0,
                     chunk_size: int = 25000, keep_full_state: bool = False):
    """Yield PathSet chunks covering paths [0, n_paths); memory-bounded."""
    start = 0
    while start < n_paths:
        count = min(chunk_size, n_paths - start)
        yield simulate(params, pool, count, horizon_days, seed, spot0=spot0,
                       path_offset=start, keep_full_state=keep_full_state)
        start += count

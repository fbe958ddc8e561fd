"""Standardized NIG margins and the Gaussian copula joint sampler.

The six innovation channels of the market simulator (equity return plus five
surface factors) are standardized normal-inverse-Gaussian variables coupled
through a Gaussian copula.  Each margin is parameterized by a skew parameter
``zeta`` and a shape parameter ``varphi``; zero mean and unit variance pin the
remaining two parameters of the classical four-parameter NIG form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import quad
from scipy.special import k1e, ndtr

from .volsurface import DomainError

# Inverse-CDF interpolation grid: half-width and knot count.  NIG tails decay
# like exp(-(alpha-|beta|)|x|); with the parameter ranges used here the mass
# beyond +-60 is far below 1e-20.
_GRID_HALFWIDTH = 60.0
_GRID_KNOTS = 4001
_GL_NODES = 12


@dataclass(frozen=True)
class NigParams:
    """Two-parameter standardized NIG: skew ``zeta``, shape ``varphi > 0``."""

    zeta: float
    varphi: float

    def __post_init__(self):
        if not (self.varphi > 0 and np.isfinite(self.varphi) and np.isfinite(self.zeta)):
            raise DomainError(f"invalid NIG parameters zeta={self.zeta}, varphi={self.varphi}")


@dataclass(frozen=True)
class CopulaSpec:
    """Correlation matrix over the six innovation channels."""

    corr: np.ndarray

    def __post_init__(self):
        corr = np.asarray(self.corr, dtype=float)
        if corr.shape != (6, 6):
            raise DomainError(f"copula correlation must be 6x6, got {corr.shape}")
        if not np.allclose(corr, corr.T, atol=1e-12):
            raise DomainError("copula correlation must be symmetric")
        if not np.allclose(np.diag(corr), 1.0, atol=1e-12):
            raise DomainError("copula correlation must have unit diagonal")
        object.__setattr__(self, "corr", corr)

    def cholesky(self) -> np.ndarray:
        try:
            return np.linalg.cholesky(self.corr)
        except np.linalg.LinAlgError as exc:
            raise DomainError("copula correlation matrix is not positive definite") from exc


class NigDistribution:
    """Standardized NIG distribution: density, cgf, cdf/ppf tables, sampling.

    The four-parameter equivalents are alpha = sqrt(varphi^2 + zeta^2),
    beta = zeta, delta = varphi^3 / alpha^2, mu = -zeta * varphi^2 / alpha^2.
    The cdf/ppf tables are built lazily from panelwise Gauss-Legendre
    integration of the density and refined with Newton steps on look-up.
    """

    def __init__(self, params: NigParams):
        self.params = params
        zeta, varphi = params.zeta, params.varphi
        self.alpha = float(np.hypot(varphi, zeta))
        self.beta = float(zeta)
        self.gamma = float(varphi)
        self.delta = varphi**3 / (varphi**2 + zeta**2)
        self.mu = -zeta * varphi**2 / (varphi**2 + zeta**2)
        self._grid = None
        self._cdf_grid = None

    # -- density and cumulant generating function --------------------------

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        z = x - self.mu
        q = np.sqrt(self.delta**2 + z * z)
        # K1(a q) = k1e(a q) exp(-a q); fold the exponential into the main exp
        return (
            self.alpha * self.delta / np.pi
            * k1e(self.alpha * q) / q
            * np.exp(self.delta * self.gamma + self.beta * z - self.alpha * q)
        )

    def cgf(self, u):
        """log E[exp(u X)]; defined for |beta + u| < alpha."""
        u = np.asarray(u, dtype=float)
        inside = self.alpha**2 - (self.beta + u) ** 2
        if np.any(inside <= 0):
            raise DomainError(
                f"cgf argument outside convergence strip |{self.beta} + u| < {self.alpha}"
            )
        out = self.mu * u + self.delta * (self.gamma - np.sqrt(inside))
        return out if out.shape else float(out)

    # -- cdf / ppf ----------------------------------------------------------

    def _build_tables(self):
        lo = self.mu - _GRID_HALFWIDTH
        hi = self.mu + _GRID_HALFWIDTH
        # dense near the mode, logarithmic stretch into the tails
        t = np.linspace(-1.0, 1.0, _GRID_KNOTS)
        stretch = np.sinh(4.0 * t) / np.sinh(4.0)
        knots = self.mu + 0.5 * (hi - lo) * stretch
        nodes, weights = np.polynomial.legendre.leggauss(_GL_NODES)
        a = knots[:-1]
        b = knots[1:]
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        xs = mid[:, None] + half[:, None] * nodes[None, :]
        panel_mass = (self.pdf(xs) * weights[None, :]).sum(axis=1) * half
        cdf = np.concatenate([[0.0], np.cumsum(panel_mass)])
        total = cdf[-1]
        # left-tail mass below the grid is negligible; normalize to unit mass
        cdf = np.minimum(cdf / total, 1.0)
        self._grid = knots
        self._cdf_grid = cdf

    def cdf(self, x):
        if self._grid is None:
            self._build_tables()
        x = np.asarray(x, dtype=float)
        base = np.interp(x, self._grid, self._cdf_grid)
        return base if base.shape else float(base)

    def ppf(self, p):
        """Inverse cdf via table inversion plus Newton refinement."""
        if self._grid is None:
            self._build_tables()
        p = np.asarray(p, dtype=float)
        if np.any((p <= 0) | (p >= 1)):
            raise DomainError("ppf requires probabilities strictly inside (0, 1)")
        x = np.interp(p, self._cdf_grid, self._grid)
        # two Newton steps against the table cdf sharpen interpolation error
        for _ in range(2):
            f = np.interp(x, self._grid, self._cdf_grid) - p
            d = np.maximum(self.pdf(x), 1e-300)
            x = x - f / d
        out = np.clip(x, self._grid[0], self._grid[-1])
        return out if out.shape else float(out)

    def cdf_quad(self, x: float) -> float:
        """Adaptive-quadrature cdf, used as an independent slow oracle."""
        val, _ = quad(self.pdf, self.mu - _GRID_HALFWIDTH, x, limit=400)
        return float(val)

    # -- sampling -----------------------------------------------------------

    def sample(self, rng: np.random.Generator, size=None):
        """Draw via the inverse-Gaussian variance-mean mixture representation."""
        ig_mean = self.delta / self.gamma
        ig_shape = self.delta**2
        z = rng.wald(ig_mean, ig_shape, size=size)
        n = rng.standard_normal(size=size)
        return self.mu + self.beta * z + np.sqrt(z) * n


class GaussianCopula:
    """Joint sampler: correlated normals mapped through the NIG margin ppfs."""

    def __init__(self, spec: CopulaSpec, margins):
        if len(margins) != 6:
            raise DomainError("expected six margins")
        self.spec = spec
        self.margins = [m if isinstance(m, NigDistribution) else NigDistribution(m) for m in margins]
        self._chol = spec.cholesky()

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        z = rng.standard_normal((n, 6)) @ self._chol.T
        u = ndtr(z)
        out = np.empty_like(z)
        for i, margin in enumerate(self.margins):
            out[:, i] = margin.ppf(u[:, i])
        return out

    def sample_from_normals(self, z: np.ndarray) -> np.ndarray:
        """Map externally drawn iid standard normals (n, 6) to innovations."""
        z = z @ self._chol.T
        u = ndtr(z)
        out = np.empty_like(z)
        for i, margin in enumerate(self.margins):
            out[:, i] = margin.ppf(u[:, i])
        return out


def copula_sample(spec: CopulaSpec, margins, rng: np.random.Generator, n: int = 1) -> np.ndarray:
    return GaussianCopula(spec, margins).sample(rng, n)


def gaussian_rank_correlation(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation of normal scores; estimates the copula correlation."""
    n = len(x)
    rx = np.argsort(np.argsort(x)) + 1.0
    ry = np.argsort(np.argsort(y)) + 1.0
    from scipy.special import ndtri

    zx = ndtri(rx / (n + 1.0))
    zy = ndtri(ry / (n + 1.0))
    return float(np.corrcoef(zx, zy)[0, 1])


def load_key_value_params(path: str | Path) -> dict[str, float]:
    """Parse a plain-text ``key = value`` parameter file.

    Lines starting with '#' and blank lines are ignored.  Keys are free-form
    strings; values must parse as floats.  Used to override the compiled-in
    model parameter tables.
    """
    out: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, val = line.split("=", 1)
        try:
            out[key.strip()] = float(val.strip())
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: bad float {val.strip()!r}") from exc
    return out

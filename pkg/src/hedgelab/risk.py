"""Risk measures on terminal hedging errors and the soft shortfall constraint.

Three measures are supported: mean squared error, semi mean-squared error
(positive part only), and conditional value-at-risk from the plug-in order
statistic estimator.  The soft constraint is the fraction of paths whose
running tracking error ever exceeds the initial portfolio value; training
replaces its indicator with a sigmoid surrogate (see ``training``), while
reporting always uses the hard count implemented here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .volsurface import DomainError

MEASURES = ("mse", "smse", "cvar")


@dataclass(frozen=True)
class RiskMeasure:
    kind: str
    alpha: float = 0.95        # CVaR confidence level; ignored by mse/smse

    def __post_init__(self):
        if self.kind not in MEASURES:
            raise DomainError(f"unknown risk measure {self.kind!r}; expected one of {MEASURES}")
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class PenaltyConfig:
    measure: RiskMeasure
    penalty_lambda: float = 1.0

    def __post_init__(self):
        if self.penalty_lambda < 0:
            raise DomainError("penalty weight must be nonnegative")


def var_estimate(errors: np.ndarray, alpha: float) -> float:
    """Order-statistic VaR: the ceil(alpha * B)-th smallest error."""
    errors = np.asarray(errors, dtype=float)
    b = errors.size
    if b == 0:
        raise DomainError("empty error sample")
    idx = int(np.ceil(alpha * b)) - 1
    return float(np.partition(errors, idx)[idx])


def risk(measure: RiskMeasure, errors: np.ndarray) -> float:
    errors = np.asarray(errors, dtype=float)
    if errors.size == 0:
        raise DomainError("empty error sample")
    if measure.kind == "mse":
        return float(np.mean(errors**2))
    if measure.kind == "smse":
        return float(np.mean(np.where(errors >= 0, errors, 0.0) ** 2))
    var = var_estimate(errors, measure.alpha)
    b = errors.size
    excess = np.maximum(errors - var, 0.0)
    return float(var + excess.sum() / ((1.0 - measure.alpha) * b))


def soft_constraint(trails) -> float:
    """Fraction of paths whose tracking error ever exceeds the initial value."""
    xi = np.asarray(trails.tracking_error, dtype=float)
    v0 = np.asarray(trails.initial_value, dtype=float)
    breach = xi.max(axis=1) > v0
    return float(breach.mean())


def penalty(config: PenaltyConfig, trails) -> float:
    return risk(config.measure, trails.terminal_error) \
        + config.penalty_lambda * soft_constraint(trails)


def risk_torch(measure: RiskMeasure, errors):
    """Differentiable counterpart of ``risk`` on a 1-d torch tensor.

    The CVaR branch differentiates the plug-in estimator: the gradient flows
    through the VaR order statistic and the positive exceedances.
    """
    import torch

    if measure.kind == "mse":
        return (errors**2).mean()
    if measure.kind == "smse":
        return (torch.relu(errors) ** 2).mean()
    b = errors.shape[0]
    idx = int(np.ceil(measure.alpha * b)) - 1
    var = torch.sort(errors).values[idx]
    return var + torch.relu(errors - var).sum() / ((1.0 - measure.alpha) * b)


def soft_constraint_torch(tracking_error, v0, temperature_scale: float = 0.05):
    """Sigmoid surrogate of the breach indicator for backpropagation.

    ``tracking_error`` is (n, T+1), ``v0`` is (n,); the sigmoid temperature is
    ``temperature_scale * v0`` per path.
    """
    import torch

    peak = tracking_error.max(dim=1).values
    temp = temperature_scale * v0
    return torch.sigmoid((peak - v0) / temp).mean()

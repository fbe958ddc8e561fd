"""hedgelab: a deep-hedging laboratory on simulated IV-surface dynamics."""

__version__ = "0.1.0"

from .jivr import (InitialStatePool, JivrParams, MarketState, PathSet,
                   default_params, simulate, synthetic_pool)
from .market import CostSpec, HedgePortfolio, InstrumentSpec, run_episode
from .policy import (DeltaGammaPolicy, GatedPolicy, LelandDeltaPolicy,
                     RnnFnnPolicy, gated)
from .risk import PenaltyConfig, RiskMeasure, penalty, risk, soft_constraint
from .stochastics import CopulaSpec, GaussianCopula, NigDistribution, NigParams
from .volsurface import (OptionQuote, SurfaceCoefficients, bs_delta, bs_gamma,
                         bs_price, leland_vol, moneyness, surface_vol)

__all__ = [
    "__version__",
    "InitialStatePool", "JivrParams", "MarketState", "PathSet",
    "default_params", "simulate", "synthetic_pool",
    "CostSpec", "HedgePortfolio", "InstrumentSpec", "run_episode",
    "DeltaGammaPolicy", "GatedPolicy", "LelandDeltaPolicy", "RnnFnnPolicy", "gated",
    "PenaltyConfig", "RiskMeasure", "penalty", "risk", "soft_constraint",
    "CopulaSpec", "GaussianCopula", "NigDistribution", "NigParams",
    "OptionQuote", "SurfaceCoefficients", "bs_delta", "bs_gamma", "bs_price",
    "leland_vol", "moneyness", "surface_vol",
]

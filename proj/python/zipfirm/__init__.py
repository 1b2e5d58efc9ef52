"""Simon-model firm simulator and Zipf/Pareto estimators."""

from ._core import (
    Economy,
    Error,
    SimConfig,
    bayes_compose,
    detect_crossover,
    entry_count,
    fit_power_law,
    fit_stretched_exponential,
    leverage_ratios,
    mann_whitney_u,
    simulate,
)

try:
    from ._core import __version__
except ImportError:  # pragma: no cover
    __version__ = "0.0.0"

__all__ = [
    "Economy",
    "Error",
    "SimConfig",
    "bayes_compose",
    "detect_crossover",
    "entry_count",
    "fit_power_law",
    "fit_stretched_exponential",
    "leverage_ratios",
    "mann_whitney_u",
    "simulate",
]

"""Monte-Carlo gradient statistics, sweeps, decay fits and bounds."""
from .engine import CHUNK, gradient_chunk, loss_of, sample_state
from .estimation import (
    EPSILONS,
    GradientAccumulator,
    VarianceReport,
    distance_point,
    left_site,
    mc_variance,
    size_point,
    sweep_distance,
    sweep_system_size,
)
from .estimators import GradientVarianceEstimator, sweep_with_estimator
from .fitting import (
    DecayFit,
    ExponentialDecayRegressor,
    fit_exponential,
    theorem1_bound,
    theorem1_site_factor,
    theorem2_bound,
)

__all__ = [
    "CHUNK", "gradient_chunk", "loss_of", "sample_state", "EPSILONS", "GradientAccumulator",
    "VarianceReport", "left_site", "size_point", "distance_point", "mc_variance", "sweep_distance", "sweep_system_size",
    "GradientVarianceEstimator", "sweep_with_estimator", "DecayFit", "ExponentialDecayRegressor",
    "fit_exponential", "theorem1_bound", "theorem1_site_factor", "theorem2_bound",
]

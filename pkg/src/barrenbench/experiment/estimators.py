"""Estimator-style wrappers around the Monte-Carlo engine."""
from __future__ import annotations

from sklearn.base import BaseEstimator, clone

from ..config import ExperimentConfig
from ..errors import ValidationError
from .estimation import VarianceReport, mc_variance

__all__ = ["GradientVarianceEstimator", "sweep_with_estimator"]


class GradientVarianceEstimator(BaseEstimator):
    """Monte-Carlo gradient variance for one configuration.

    ``fit`` ignores ``X`` and ``y``; they are accepted for pipeline
    compatibility. Fitted attributes mirror :class:`VarianceReport`.

    Parameters
    ----------
    config : ExperimentConfig
    threads : int
        Worker threads; results do not depend on it.
    """

    def __init__(self, config: ExperimentConfig | None = None, threads: int = 1):
        self.config = config
        self.threads = threads

    def fit(self, X=None, y=None):
        if not isinstance(self.config, ExperimentConfig):
            raise ValidationError("config must be an ExperimentConfig")
        report = mc_variance(self.config, threads=self.threads)
        self.report_ = report
        self.mean_grad_ = report.mean_grad
        self.var_grad_ = report.var_grad
        self.std_error_ = report.std_error
        self.samples_used_ = report.samples_used
        self.converged_ = report.converged
        return self


def sweep_with_estimator(estimator: GradientVarianceEstimator, configs) -> list[VarianceReport]:
    """Fit a clone of ``estimator`` per configuration, in order."""
    return [clone(estimator).set_params(config=c).fit().report_ for c in configs]

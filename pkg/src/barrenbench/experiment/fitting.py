"""Exponential decay fits and closed-form variance bounds."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ..errors import ValidationError

__all__ = [
    "DecayFit",
    "ExponentialDecayRegressor",
    "fit_exponential",
    "theorem1_bound",
    "theorem1_site_factor",
    "theorem2_bound",
]


@dataclass(frozen=True)
class DecayFit:
    """Least-squares line through (x, ln var).

    ``per_step_factor = exp(slope)``; ``slope_stderr`` is the usual OLS
    standard error of the slope.
    """

    slope: float
    intercept: float
    r_squared: float
    per_step_factor: float
    slope_stderr: float
    points: int

    def to_dict(self) -> dict:
        return asdict(self)


class ExponentialDecayRegressor(RegressorMixin, BaseEstimator):
    """Fit ``y = exp(intercept + slope * x)`` by least squares in log space.

    ``score`` returns R^2 of the log-space fit. A constant target has no
    variance to explain; its R^2 is reported as 0.
    """

    def fit(self, X, y):
        X, y = check_X_y(X, y, ensure_min_samples=3, y_numeric=True)
        if X.shape[1] != 1:
            raise ValidationError("X must have a single feature column")
        if np.any(y <= 0) or not np.all(np.isfinite(y)):
            raise ValidationError("variances must be finite and strictly positive")
        x, ly = X[:, 0], np.log(y)
        if np.ptp(x) == 0:
            raise ValidationError("x values must not all coincide")
        res = stats.linregress(x, ly)
        self.slope_ = float(res.slope)
        self.intercept_ = float(res.intercept)
        self.slope_stderr_ = float(res.stderr)
        self.r_squared_ = _r_squared(ly, self.intercept_ + self.slope_ * x)
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "slope_")
        X = check_array(X)
        return np.exp(self.intercept_ + self.slope_ * X[:, 0])

    def score(self, X, y, sample_weight=None):
        check_is_fitted(self, "slope_")
        X, y = check_X_y(X, y)
        return _r_squared(np.log(y), np.log(self.predict(X)))

    def to_fit(self) -> DecayFit:
        check_is_fitted(self, "slope_")
        return DecayFit(self.slope_, self.intercept_, self.r_squared_, float(np.exp(self.slope_)),
                        self.slope_stderr_, 0)


def _r_squared(y, pred) -> float:
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot == 0.0:
        return 0.0
    return float(min(1.0, max(0.0, 1.0 - np.sum((y - pred) ** 2) / ss_tot)))


def fit_exponential(xs, variances) -> DecayFit:
    """Fit ``var ~ C * factor**x`` over at least three positive points."""
    X = np.asarray(xs, dtype=float).reshape(-1, 1)
    reg = ExponentialDecayRegressor().fit(X, np.asarray(variances, dtype=float))
    fit = reg.to_fit()
    return DecayFit(fit.slope, fit.intercept, fit.r_squared, fit.per_step_factor,
                    fit.slope_stderr, len(X))


def theorem1_site_factor(D: int, d: int) -> float:
    """(1 + 1/D)(1 + 1/(Dd)) / (d^2 - 1/D^2)."""
    return (1 + 1 / D) * (1 + 1 / (D * d)) / (d * d - 1 / D ** 2)


def theorem1_bound(n: int, D: int, d: int, tr_g: float = 0.0, tr_g2: float = 2.0) -> float:
    """Upper bound on the global-loss gradient variance at system size n.

    ``tr_g`` and ``tr_g2`` are Tr(G) and Tr(G^2) of the derivative generator.
    """
    if D < 2 or d < 2:
        raise ValidationError("the bound needs D, d >= 2")
    N = D * d
    prefactor = 2.0 * (N - 1) / ((N * N - 1) * N)
    c_g = 2.0 * tr_g2 - 2.0 * tr_g ** 2
    return prefactor * theorem1_site_factor(D, d) ** (n - 1) * c_g


def theorem2_bound(delta: float, d: int, C: float) -> float:
    """C * d**(-delta)."""
    if delta < 0:
        raise ValidationError("delta must be non-negative")
    if not C > 0:
        raise ValidationError("calibration constant must be positive")
    return float(C) * float(d) ** (-float(delta))

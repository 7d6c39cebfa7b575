"""Monte-Carlo gradient statistics and parameter sweeps."""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ..config import ExperimentConfig
from ..errors import ValidationError
from .engine import CHUNK, direction_count, gradient_chunk

__all__ = [
    "VarianceReport",
    "GradientAccumulator",
    "mc_variance",
    "sweep_system_size",
    "sweep_distance",
    "left_site",
    "size_point",
    "distance_point",
    "EPSILONS",
]

EPSILONS = (0.01, 0.05)


@dataclass(frozen=True)
class VarianceReport:
    """Summary of one Monte-Carlo run.

    ``var_grad`` is the per-direction biased variance averaged over
    directions; ``std_error`` is its delta-method standard error.
    ``mean_std_error`` is the standard error of ``mean_grad``.
    ``exceed_fraction[eps]`` is the fraction of gradient entries with
    ``|g| > eps``.
    """

    mean_grad: float
    var_grad: float
    std_error: float
    mean_std_error: float
    samples_used: int
    converged: bool
    directions: int
    bound_value: float | None = None
    wall_time: float = 0.0
    exceed_fraction: dict = field(default_factory=dict)

    def to_dict(self, timing: bool = True) -> dict:
        out = asdict(self)
        out["exceed_fraction"] = {str(k): v for k, v in self.exceed_fraction.items()}
        if not timing:
            out.pop("wall_time")
        return out


class GradientAccumulator:
    """Streaming sufficient statistics of per-sample gradient vectors.

    Sums are added in call order, so feeding chunks in a fixed order gives
    bitwise reproducible results.
    """

    def __init__(self, directions: int, epsilons=EPSILONS):
        P = directions
        self.P = P
        self.count = 0
        self.s_g = np.zeros(P)
        self.s_g2 = np.zeros(P)
        self.s_a = 0.0
        self.s_a2 = 0.0
        self.s_ag = np.zeros(P)
        self.s_gg = np.zeros((P, P))
        self.s_m = 0.0
        self.s_m2 = 0.0
        self.epsilons = tuple(epsilons)
        self.s_exceed = np.zeros(len(self.epsilons))

    def add(self, g: np.ndarray):
        g = np.asarray(g, dtype=float)
        if g.ndim != 2 or g.shape[1] != self.P:
            raise ValidationError(f"expected (samples, {self.P}) gradients, got {g.shape}")
        a = np.mean(g * g, axis=1)
        m = np.mean(g, axis=1)
        self.count += g.shape[0]
        self.s_g += g.sum(axis=0)
        self.s_g2 += (g * g).sum(axis=0)
        self.s_a += a.sum()
        self.s_a2 += (a * a).sum()
        self.s_ag += a @ g
        self.s_gg += g.T @ g
        self.s_m += m.sum()
        self.s_m2 += (m * m).sum()
        for k, eps in enumerate(self.epsilons):
            self.s_exceed[k] += np.count_nonzero(np.abs(g) > eps) / self.P

    @property
    def means(self) -> np.ndarray:
        return self.s_g / self.count

    @property
    def variances(self) -> np.ndarray:
        mu = self.means
        return np.maximum(self.s_g2 / self.count - mu * mu, 0.0)

    def variance(self) -> float:
        return float(np.mean(self.variances))

    def variance_std_error(self) -> float:
        """SE of the averaged variance from y_s = mean_p (g_sp - mu_p)^2."""
        S, P, mu = self.count, self.P, self.means
        c = float(mu @ mu) / P
        gmu = float(self.s_g @ mu)
        sum_y = self.s_a - 2.0 * gmu / P + S * c
        sum_y2 = (self.s_a2 + 2.0 * c * self.s_a + S * c * c
                  - 4.0 / P * (float(self.s_ag @ mu) + c * gmu)
                  + 4.0 / P ** 2 * float(mu @ self.s_gg @ mu))
        var_y = max(sum_y2 / S - (sum_y / S) ** 2, 0.0)
        return float(np.sqrt(var_y / S))

    def mean(self) -> float:
        return self.s_m / self.count

    def mean_std_error(self) -> float:
        var_m = max(self.s_m2 / self.count - self.mean() ** 2, 0.0)
        return float(np.sqrt(var_m / self.count))

    def exceed_fraction(self) -> dict:
        return {eps: float(v / self.count) for eps, v in zip(self.epsilons, self.s_exceed)}


def _chunks(start: int, stop: int):
    return [(a, min(a + CHUNK, stop)) for a in range(start, stop, CHUNK)]


def mc_variance(cfg: ExperimentConfig, threads: int = 1, bound: float | None = None) -> VarianceReport:
    """Sample gradients in blocks until the variance estimate settles.

    After every block the cumulative variance is compared with the value
    after the previous block; the run stops once the relative change is
    below ``cfg.rel_tol``, or when ``cfg.budget`` samples have been used.
    """
    threads = max(1, int(threads))
    t0 = time.perf_counter()
    acc = GradientAccumulator(direction_count(cfg))
    prev = None
    converged = False
    with ThreadPoolExecutor(max_workers=threads) as pool:
        start = 0
        while start < cfg.budget:
            stop = min(start + cfg.block, cfg.budget)
            spans = _chunks(start, stop)
            for g in pool.map(lambda s: gradient_chunk(cfg, *s), spans):
                acc.add(g)
            start = stop
            var = acc.variance()
            if prev is None:
                if var == 0.0:
                    converged = True
                    break
            elif abs(var - prev) <= cfg.rel_tol * prev:
                converged = True
                break
            prev = var
    return VarianceReport(
        mean_grad=float(acc.mean()),
        var_grad=acc.variance(),
        std_error=acc.variance_std_error(),
        mean_std_error=acc.mean_std_error(),
        samples_used=acc.count,
        converged=converged,
        directions=acc.P,
        bound_value=bound,
        wall_time=time.perf_counter() - t0,
        exceed_fraction=acc.exceed_fraction(),
    )


def left_site(m: int, delta: int, n: int) -> int:
    """1-based site ``delta`` steps to the left of ``m`` on a ring of n sites."""
    return (m - 1 - delta) % n + 1


def size_point(template: ExperimentConfig, n: int) -> ExperimentConfig:
    """Template resized to n sites.

    For local losses the distance between derivative and observable site is
    kept, with the derivative placed on the left.
    """
    delta = template.delta
    changes = {"n": int(n)}
    if delta is not None:
        m = template.observable_site if template.observable_site is not None else max(1, n // 2)
        changes["grad_site"] = left_site(m, delta, n)
    return template.replace(**changes)


def distance_point(template: ExperimentConfig, delta: int, n: int | None = None) -> ExperimentConfig:
    """Template with the derivative ``delta`` sites to the left of the observable."""
    base = template if n is None else template.replace(n=int(n))
    if base.loss not in ("local", "local_numerator"):
        raise ValidationError("distance sweeps need a local loss")
    if not 0 <= delta <= base.n // 2:
        raise ValidationError(f"delta {delta} outside [0, {base.n // 2}]")
    return base.replace(grad_site=left_site(base.m, int(delta), base.n))


def sweep_system_size(template: ExperimentConfig, n_values, threads: int = 1,
                      bound=None) -> list[VarianceReport]:
    """One report per system size (see :func:`size_point`).

    ``bound``, if given, is called with each configuration.
    """
    n_values = [int(v) for v in n_values]
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValidationError("n_values must be strictly increasing")
    cfgs = [size_point(template, n) for n in n_values]
    return [mc_variance(c, threads, None if bound is None else bound(c)) for c in cfgs]


def sweep_distance(template: ExperimentConfig, delta_values, n: int | None = None,
                   threads: int = 1, bound=None) -> list[VarianceReport]:
    """One report per distance (see :func:`distance_point`)."""
    cfgs = [distance_point(template, d, n) for d in delta_values]
    return [mc_variance(c, threads, None if bound is None else bound(c)) for c in cfgs]

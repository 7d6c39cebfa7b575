"""Experiment configuration shared by the Monte-Carlo engine, the exact
oracle and the CLI.

JSON layout::

    {"n": 6, "d": 2, "D": 2, "loss": "local", "mode": "raw_tensor",
     "observable": {"name": "x", "site": 3},
     "grad": {"site": 3, "index": "all"},
     "samples": {"budget": 500000, "block": 10000, "rel_tol": 1e-3},
     "seed": 1234, "output_dir": "runs"}
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .grad import MODES
from .loss import LOSS_KINDS, TargetState, uniform_target
from .mps import LocalObservable
from .unitary import hermitian_basis

__all__ = ["ExperimentConfig", "observable_matrix", "periodic_distance", "ConfigError"]

OBSERVABLES = ("x", "y", "z", "zero", "identity")
GENERATORS = ("gm1",)


class ConfigError(ValidationError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def observable_matrix(name: str, d: int) -> np.ndarray:
    """Named single-site observable on C^d (Pauli analogs for d > 2)."""
    if name == "zero":
        return np.zeros((d, d), dtype=np.complex128)
    if name == "identity":
        return np.eye(d, dtype=np.complex128)
    basis = hermitian_basis(d)
    npairs = d * (d - 1) // 2
    if name == "x":
        return basis[0]
    if name == "y":
        return basis[npairs]
    if name == "z":
        z = np.zeros((d, d), dtype=np.complex128)
        z[0, 0], z[1, 1] = 1.0, -1.0
        return z
    raise ValueError(f"unknown observable {name!r}")


def periodic_distance(i: int, m: int, n: int) -> int:
    a = abs(i - m)
    return min(a, n - a)


def _int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ConfigError(name, f"expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(name, f"must be >= {minimum}, got {value}")
    return int(value)


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte-Carlo experiment.

    Sites are 1-based. ``grad_site`` / ``grad_index`` may be ``"all"``; in
    haar_split mode ``grad_index`` is ignored (one fixed generator).
    ``observable_site=None`` means ``n // 2`` (see :attr:`m`).
    """

    n: int
    d: int = 2
    D: int = 2
    loss: str = "fidelity"
    mode: str = "haar_split"
    observable: str = "x"
    observable_site: int | None = None
    grad_site: int | str = 1
    grad_index: int | str | None = "all"
    budget: int = 500_000
    block: int = 10_000
    rel_tol: float = 1e-3
    seed: int = 0
    target_bond: int = 1
    normalize_target: bool = True
    generator: str = "gm1"
    complex_raw: bool = True
    output_dir: str = "runs"

    def __post_init__(self):
        n = _int(self.n, "n", 1)
        _int(self.d, "d", 2)
        _int(self.D, "D", 1)
        if self.loss not in LOSS_KINDS:
            raise ConfigError("loss", f"must be one of {LOSS_KINDS}, got {self.loss!r}")
        if self.mode not in MODES:
            raise ConfigError("mode", f"must be one of {MODES}, got {self.mode!r}")
        if self.observable not in OBSERVABLES:
            raise ConfigError("observable.name", f"must be one of {OBSERVABLES}")
        m = _int(self.m, "observable.site", 1)
        if m > n:
            raise ConfigError("observable.site", f"site {m} exceeds n = {n}")
        if self.grad_site != "all":
            i = _int(self.grad_site, "grad.site", 1)
            if i > n:
                raise ConfigError("grad.site", f"site {i} exceeds n = {n}")
        if self.mode == "haar_split":
            if self.grad_site == "all":
                raise ConfigError("grad.site", "haar_split mode needs a single site")
        elif self.grad_index != "all":
            k = _int(self.grad_index, "grad.index", 1)
            if k > self.params_per_site:
                raise ConfigError("grad.index", f"index {k} exceeds {self.params_per_site}")
        if self.grad_site == "all" and self.grad_index != "all":
            raise ConfigError("grad.index", "site 'all' requires index 'all'")
        _int(self.budget, "samples.budget", 1)
        _int(self.block, "samples.block", 1)
        if not self.rel_tol > 0:
            raise ConfigError("samples.rel_tol", "must be positive")
        _int(self.seed, "seed", 0)
        _int(self.target_bond, "target_bond", 1)
        if self.generator not in GENERATORS:
            raise ConfigError("generator", f"must be one of {GENERATORS}")

    # ------------------------------------------------------------------
    @property
    def m(self) -> int:
        """Observable site, 1-based."""
        if self.observable_site is None:
            return max(1, self.n // 2)
        return self.observable_site

    @property
    def N(self) -> int:
        return self.d * self.D

    @property
    def params_per_site(self) -> int:
        if self.mode == "theta":
            return self.N ** 2
        if self.mode == "raw_tensor":
            return (2 if self.complex_raw else 1) * self.d * self.D * self.D
        return 1

    @property
    def delta(self) -> int | None:
        """Periodic distance between derivative site and observable site."""
        if self.grad_site == "all" or self.loss not in ("local", "local_numerator"):
            return None
        return periodic_distance(int(self.grad_site), self.m, self.n)

    def local_observable(self) -> LocalObservable:
        return LocalObservable(observable_matrix(self.observable, self.d), self.m)

    def target_state(self) -> TargetState:
        return uniform_target(self.n, self.d, bond=self.target_bond, normalize=self.normalize_target)

    def split_generator(self) -> np.ndarray:
        return hermitian_basis(self.N)[0]

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    # ------------------------------------------------------------------
    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        known = {"n", "d", "D", "loss", "mode", "observable", "grad", "samples", "seed",
                 "output_dir", "target_bond", "normalize_target", "generator", "complex_raw"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown key")
        if "n" not in raw:
            raise ConfigError("n", "required")
        kw = {k: raw[k] for k in ("n", "d", "D", "loss", "mode", "seed", "output_dir",
                                  "target_bond", "normalize_target", "generator",
                                  "complex_raw") if k in raw}
        obs = raw.get("observable", {})
        if not isinstance(obs, dict):
            raise ConfigError("observable", "must be an object {name, site}")
        if "name" in obs:
            kw["observable"] = obs["name"]
        if "site" in obs:
            kw["observable_site"] = obs["site"]
        grad = raw.get("grad", {})
        if not isinstance(grad, dict):
            raise ConfigError("grad", "must be an object {site, index}")
        if "site" in grad:
            kw["grad_site"] = grad["site"]
        if "index" in grad:
            kw["grad_index"] = grad["index"]
        samples = raw.get("samples", {})
        if not isinstance(samples, dict):
            raise ConfigError("samples", "must be an object {budget, block, rel_tol}")
        for key in ("budget", "block", "rel_tol"):
            if key in samples:
                kw[key] = samples[key]
        return cls(**kw)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"line {exc.lineno}", exc.msg) from exc
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        return {
            "n": self.n, "d": self.d, "D": self.D, "loss": self.loss, "mode": self.mode,
            "observable": {"name": self.observable, "site": self.m},
            "grad": {"site": self.grad_site, "index": self.grad_index},
            "samples": {"budget": self.budget, "block": self.block, "rel_tol": self.rel_tol},
            "seed": self.seed, "output_dir": self.output_dir,
            "target_bond": self.target_bond, "normalize_target": self.normalize_target,
            "generator": self.generator, "complex_raw": self.complex_raw,
        }

"""Global and local loss functions of an MPS.

All losses are pure functions of the state and fixed problem data:

* ``fidelity``    1 - |<psi|phi>|^2                (no normalization of psi)
* ``normalized``  1 - |<phi|psi>|^2 / Z            Z = <psi|psi>
* ``kl``          -ln P_accept, P_accept = |<phi|psi>| / (sqrt(Z) ||phi||)
* ``local``       <psi|O_m|psi> / Z
* ``local_numerator``  <psi|O_m|psi>   (unnormalized form used by the exact oracle)
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStateError, DimensionError, DivergenceError, ValidationError
from .mps import (
    DEGENERATE_NORM,
    LocalObservable,
    MpsState,
    _expectation_numerator,
    inner_product,
    local_expectation,
    norm_sq,
    to_statevector,
)

__all__ = [
    "LOSS_KINDS",
    "TargetState",
    "uniform_target",
    "overlap",
    "global_fidelity_loss",
    "normalized_global_loss",
    "kl_loss",
    "local_loss",
    "local_numerator",
    "Loss",
]

LOSS_KINDS = ("fidelity", "normalized", "kl", "local", "local_numerator")
KL_FLOOR = 1e-300


@dataclass(frozen=True)
class TargetState:
    """Target |phi> held either as an MPS or as a dense vector."""

    mps: MpsState | None = None
    vector: np.ndarray | None = None
    normalize: bool = True

    def __post_init__(self):
        if (self.mps is None) == (self.vector is None):
            raise ValidationError("give exactly one of mps or vector")
        if self.normalize:
            if self.mps is not None:
                z = norm_sq(self.mps)
                if z < DEGENERATE_NORM:
                    raise DegenerateStateError("target has zero norm")
                object.__setattr__(self, "mps", self.mps.scaled(1.0 / np.sqrt(z)))
            else:
                v = np.asarray(self.vector, dtype=np.complex128)
                object.__setattr__(self, "vector", v / np.linalg.norm(v))
        elif self.vector is not None:
            object.__setattr__(self, "vector", np.asarray(self.vector, dtype=np.complex128))

    @property
    def norm(self) -> float:
        if self.mps is not None:
            return float(np.sqrt(norm_sq(self.mps)))
        return float(np.linalg.norm(self.vector))


def uniform_target(n: int, d: int, bond: int = 1, normalize: bool = True) -> TargetState:
    """MPS target whose site tensors are all ones (the uniform superposition)."""
    sites = tuple(np.ones((d, bond, bond)) for _ in range(n))
    return TargetState(mps=MpsState(sites), normalize=normalize)


def overlap(psi: MpsState, phi: TargetState) -> complex:
    """<phi|psi>."""
    if phi.mps is not None:
        return inner_product(psi, phi.mps)
    v = phi.vector
    if v.shape != (psi.d ** psi.n,):
        raise DimensionError(f"target vector has shape {v.shape}, expected ({psi.d ** psi.n},)")
    return complex(np.vdot(v, to_statevector(psi)))


def _checked_norm(psi: MpsState) -> float:
    z = norm_sq(psi)
    if z < DEGENERATE_NORM:
        raise DegenerateStateError(f"norm {z:.3e} below {DEGENERATE_NORM}")
    return z


def global_fidelity_loss(psi: MpsState, phi: TargetState) -> float:
    return 1.0 - abs(overlap(psi, phi)) ** 2


def normalized_global_loss(psi: MpsState, phi: TargetState) -> float:
    z = _checked_norm(psi)
    return 1.0 - abs(overlap(psi, phi)) ** 2 / z


def kl_loss(psi: MpsState, phi: TargetState) -> float:
    """KL divergence of the accept/reject distribution, natural log.

    The data distribution accepts with certainty, so the divergence is
    ``-ln P_accept`` with ``P_accept = |<phi|psi>| / (sqrt(Z) ||phi||)``
    (overlap modulus, not its square).
    """
    z = _checked_norm(psi)
    p = abs(overlap(psi, phi)) / (np.sqrt(z) * phi.norm)
    if p <= KL_FLOOR:
        raise DivergenceError("acceptance probability is zero; KL divergence is infinite")
    return -np.log(p)


def local_loss(psi: MpsState, obs: LocalObservable) -> float:
    return local_expectation(psi, obs)


def local_numerator(psi: MpsState, obs: LocalObservable) -> float:
    if not 1 <= obs.site <= psi.n:
        raise ValidationError(f"observable site {obs.site} outside [1, {psi.n}]")
    return _expectation_numerator(psi, obs.matrix, obs.site).real


_GLOBAL = {
    "fidelity": global_fidelity_loss,
    "normalized": normalized_global_loss,
    "kl": kl_loss,
}
_LOCAL = {"local": local_loss, "local_numerator": local_numerator}


@dataclass(frozen=True)
class Loss:
    """A loss kind bound to its problem data; call it on an MpsState."""

    kind: str
    target: TargetState | None = None
    observable: LocalObservable | None = None

    def __post_init__(self):
        if self.kind not in LOSS_KINDS:
            raise ValidationError(f"unknown loss {self.kind!r}; choose from {LOSS_KINDS}")
        if self.kind in _GLOBAL and self.target is None:
            raise ValidationError(f"{self.kind} loss needs a target state")
        if self.kind in _LOCAL and self.observable is None:
            raise ValidationError(f"{self.kind} loss needs an observable")

    @property
    def is_global(self) -> bool:
        return self.kind in _GLOBAL

    def __call__(self, psi: MpsState) -> float:
        if self.is_global:
            return _GLOBAL[self.kind](psi, self.target)
        return _LOCAL[self.kind](psi, self.observable)

"""Loss gradients with respect to one site parameter.

Three parameterizations are supported:

``theta``       every site is a :class:`ParamUnitarySite`; parameters are angles.
``haar_split``  sites are fixed unitaries, at least one is a :class:`HaarSplitSite`
                whose inserted angle (at 0) is the parameter.
``raw_tensor``  sites are bare (d, D, D) tensors; a parameter is the real or
                imaginary part of one entry.

``analytic_grad`` differentiates exactly by replacing the site tensor with its
tangent and contracting; ``finite_diff_grad`` uses central differences and
works in every mode.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateStateError, UnsupportedModeError, ValidationError
from .loss import Loss, overlap
from .mps import (
    DEGENERATE_NORM,
    MpsState,
    embed_unitary_mps,
    inner_product,
    norm_sq,
    ring_trace,
    site_from_unitary,
    transfer_matrix,
)
from .unitary import HaarSplitSite, ParamUnitarySite, build_unitary, derivative_factors

__all__ = [
    "MODES",
    "GradTarget",
    "StateConfig",
    "analytic_grad",
    "finite_diff_grad",
    "central_difference",
    "DEFAULT_STEP",
]

MODES = ("theta", "haar_split", "raw_tensor")
DEFAULT_STEP = 1e-5


@dataclass(frozen=True)
class GradTarget:
    """Which parameter to differentiate: 1-based ``site`` and ``param_index``.

    ``param_index`` is the generator index in theta mode, is ignored in
    haar_split mode, and in raw_tensor mode counts the real components of the
    site tensor in the order (j, l, r, re/im).
    """

    site: int
    param_index: int | None = None
    mode: str = "theta"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.site < 1:
            raise ValidationError("site is 1-based")
        if self.mode != "haar_split" and (self.param_index is None or self.param_index < 1):
            raise ValidationError(f"{self.mode} mode needs a 1-based param_index")


@dataclass(frozen=True)
class StateConfig:
    """A parameterized MPS: one site specification per site."""

    mode: str
    d: int
    D: int
    sites: tuple

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        sites = tuple(self.sites)
        if self.mode == "theta" and not all(isinstance(s, ParamUnitarySite) for s in sites):
            raise ValidationError("theta mode needs ParamUnitarySite entries")
        if self.mode == "raw_tensor":
            sites = tuple(np.asarray(s, dtype=np.complex128) for s in sites)
        object.__setattr__(self, "sites", sites)

    @property
    def n(self) -> int:
        return len(self.sites)

    def _unitary(self, spec) -> np.ndarray:
        if isinstance(spec, ParamUnitarySite):
            return build_unitary(spec)
        if isinstance(spec, HaarSplitSite):
            return spec.unitary()
        return np.asarray(spec)

    def state(self) -> MpsState:
        if self.mode == "raw_tensor":
            return MpsState(self.sites)
        return embed_unitary_mps([self._unitary(s) for s in self.sites], self.d, self.D)

    def _check_target(self, target: GradTarget):
        if target.mode != self.mode:
            raise ValidationError(f"target mode {target.mode} != state mode {self.mode}")
        if not 1 <= target.site <= self.n:
            raise ValidationError(f"site {target.site} outside [1, {self.n}]")
        spec = self.sites[target.site - 1]
        if self.mode == "theta" and not 1 <= target.param_index <= len(spec.generators):
            raise ValidationError(f"param_index {target.param_index} out of range")
        if self.mode == "haar_split" and not isinstance(spec, HaarSplitSite):
            raise ValidationError(f"site {target.site} is not a HaarSplitSite")
        if self.mode == "raw_tensor" and not 1 <= target.param_index <= 2 * spec.size:
            raise ValidationError(f"param_index {target.param_index} out of range")

    def tangent(self, target: GradTarget) -> np.ndarray:
        """d(site tensor)/d(parameter) for theta and haar_split modes."""
        self._check_target(target)
        spec = self.sites[target.site - 1]
        if self.mode == "theta":
            left, g, right = derivative_factors(spec, target.param_index)
            du = 1j * left @ g @ right
        elif self.mode == "haar_split":
            du = spec.derivative()
        else:
            raise UnsupportedModeError("raw_tensor gradients are taken by finite differences")
        return site_from_unitary(du, self.d, self.D)

    def shifted(self, target: GradTarget, delta: float) -> "StateConfig":
        """Copy with the targeted parameter moved by ``delta``."""
        self._check_target(target)
        sites = list(self.sites)
        k = target.site - 1
        spec = sites[k]
        if self.mode == "theta":
            idx = target.param_index - 1
            sites[k] = spec.with_angle(idx, spec.angles[idx] + delta)
        elif self.mode == "haar_split":
            sites[k] = spec.unitary(delta)
        else:
            flat = np.stack([spec.real, spec.imag], axis=-1).reshape(-1)
            flat[target.param_index - 1] += delta
            pair = flat.reshape(spec.shape + (2,))
            sites[k] = pair[..., 0] + 1j * pair[..., 1]
        return StateConfig(self.mode, self.d, self.D, tuple(sites))


def _mixed_numerator(ket: MpsState, bra: MpsState, op, site: int) -> complex:
    mats = [transfer_matrix(a, b) for a, b in zip(ket.sites, bra.sites)]
    k = site - 1
    mats[k] = transfer_matrix(ket.sites[k], bra.sites[k], op=op)
    return complex(ring_trace(mats))


def analytic_grad(loss: Loss, state: StateConfig, target: GradTarget) -> float:
    """Exact derivative of ``loss`` with respect to the targeted parameter.

    The tangent state (site tensor replaced by its derivative) is contracted
    against the target (global losses) or against the state with the
    observable inserted (local losses); quotients follow the usual rule.
    """
    if state.mode == "raw_tensor":
        raise UnsupportedModeError("use finite_diff_grad in raw_tensor mode")
    psi = state.state()
    dpsi = psi.replace_site(target.site, state.tangent(target))

    if loss.kind == "local_numerator" or loss.kind == "local":
        obs = loss.observable
        num = _mixed_numerator(psi, psi, obs.matrix, obs.site).real
        dnum = 2.0 * _mixed_numerator(dpsi, psi, obs.matrix, obs.site).real
        if loss.kind == "local_numerator":
            return dnum
        z, dz = _norm_and_derivative(psi, dpsi)
        return dnum / z - num * dz / z ** 2

    ov = overlap(psi, loss.target)
    dov = overlap(dpsi, loss.target)
    dfid = 2.0 * (np.conj(ov) * dov).real  # d|<phi|psi>|^2
    if loss.kind == "fidelity":
        return -dfid
    z, dz = _norm_and_derivative(psi, dpsi)
    if loss.kind == "normalized":
        return -(dfid / z - abs(ov) ** 2 * dz / z ** 2)
    # kl: -ln|ov| + ln sqrt(Z) + const
    return -0.5 * dfid / abs(ov) ** 2 + 0.5 * dz / z


def _norm_and_derivative(psi: MpsState, dpsi: MpsState):
    z = norm_sq(psi)
    if z < DEGENERATE_NORM:
        raise DegenerateStateError(f"norm {z:.3e} below {DEGENERATE_NORM}")
    return z, 2.0 * inner_product(dpsi, psi).real


def central_difference(f: Callable[[float], float], x: float, h: float = DEFAULT_STEP) -> float:
    """(f(x + h) - f(x - h)) / 2h."""
    if not h > 0:
        raise ValidationError("step must be positive")
    return (f(x + h) - f(x - h)) / (2.0 * h)


def finite_diff_grad(loss: Loss, state: StateConfig, target: GradTarget,
                     h: float = DEFAULT_STEP) -> float:
    """Central-difference derivative; O(h^2) truncation error."""
    return central_difference(lambda t: loss(state.shifted(target, t).state()), 0.0, h)

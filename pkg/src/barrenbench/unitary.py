"""Haar sampling, Hermitian generator bases and parameterized site unitaries.

A parameterized site unitary is the ordered product

    U(theta) = exp(i theta_1 G_1) exp(i theta_2 G_2) ... exp(i theta_L G_L)
             = U_minus @ U_plus,

with ``U_minus`` the first ``split`` factors and ``U_plus`` the rest.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .validation import (
    check_hermitian,
    check_positive_int,
    check_random_state,
    check_unitary,
)

__all__ = [
    "haar_sample",
    "haar_batch",
    "qr_haar",
    "hermitian_basis",
    "expm_hermitian",
    "ParamUnitarySite",
    "HaarSplitSite",
    "build_unitary",
    "derivative_factors",
    "random_param_site",
    "default_split_generator",
]


def qr_haar(ginibre: np.ndarray) -> np.ndarray:
    """Map complex Ginibre matrices (any leading batch shape) to Haar unitaries.

    Q from the QR decomposition is multiplied by the phases of diag(R), which
    removes the bias plain QR introduces.
    """
    q, r = np.linalg.qr(ginibre)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[..., None, :]


def haar_batch(N: int, count: int, rng=None) -> np.ndarray:
    """``count`` independent Haar unitaries of size N, shape (count, N, N)."""
    rng = check_random_state(rng)
    z = rng.standard_normal((count, N, N, 2))
    return qr_haar((z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0))


def haar_sample(N: int, rng=None) -> np.ndarray:
    """Draw one N x N unitary from the Haar measure on U(N)."""
    N = check_positive_int(N, "N")
    return haar_batch(N, 1, rng)[0]


@lru_cache(maxsize=None)
def _gell_mann(N: int) -> tuple:
    mats = []
    for j in range(N):
        for k in range(j + 1, N):
            s = np.zeros((N, N), dtype=np.complex128)
            s[j, k] = s[k, j] = 1.0
            mats.append(s)
    for j in range(N):
        for k in range(j + 1, N):
            a = np.zeros((N, N), dtype=np.complex128)
            a[j, k] = -1j
            a[k, j] = 1j
            mats.append(a)
    for l in range(1, N):
        h = np.zeros((N, N), dtype=np.complex128)
        h[np.arange(l), np.arange(l)] = 1.0
        h[l, l] = -l
        h *= np.sqrt(2.0 / (l * (l + 1)))
        mats.append(h)
    mats.append(np.eye(N, dtype=np.complex128))
    for m in mats:
        m.setflags(write=False)
    return tuple(mats)


def hermitian_basis(N: int) -> list[np.ndarray]:
    """Generalized Gell-Mann matrices for U(N), identity appended last.

    Order: symmetric off-diagonal, antisymmetric off-diagonal, diagonal.
    The N**2 - 1 traceless elements satisfy Tr(G_a G_b) = 2 delta_ab. For
    N = 2 this gives sigma_x, sigma_y, sigma_z, I.
    """
    N = check_positive_int(N, "N", minimum=2)
    return list(_gell_mann(N))


def default_split_generator(N: int) -> np.ndarray:
    """First symmetric Gell-Mann matrix, the Pauli-x analog on C^N."""
    return hermitian_basis(N)[0]


@lru_cache(maxsize=256)
def _eigh_cached(key: bytes, N: int):
    g = np.frombuffer(key, dtype=np.complex128).reshape(N, N)
    w, v = np.linalg.eigh(g)
    return w, v


def _eigh(g: np.ndarray):
    g = np.ascontiguousarray(g, dtype=np.complex128)
    return _eigh_cached(g.tobytes(), g.shape[0])


def expm_hermitian(g: np.ndarray, theta) -> np.ndarray:
    """exp(i * theta * G) for Hermitian G via its eigendecomposition.

    ``theta`` may be an array; the result then carries theta's shape as
    leading axes.
    """
    w, v = _eigh(g)
    phases = np.exp(1j * np.multiply.outer(np.asarray(theta, dtype=float), w))
    return (v * phases[..., None, :]) @ v.conj().T


@dataclass(frozen=True)
class ParamUnitarySite:
    """Ordered exponential parameterization of one site unitary.

    ``split`` is the number of leading factors that make up ``U_minus``.
    """

    generators: tuple
    angles: tuple
    split: int

    def __post_init__(self):
        gens = tuple(check_hermitian(g, f"generator {k}") for k, g in enumerate(self.generators))
        if not gens:
            raise ValidationError("at least one generator is required")
        N = gens[0].shape[0]
        if any(g.shape != (N, N) for g in gens):
            raise ValidationError("generators must share one dimension")
        angles = tuple(float(t) for t in self.angles)
        if len(angles) != len(gens):
            raise ValidationError(
                f"{len(gens)} generators but {len(angles)} angles")
        if len(gens) > 1 and not (1 <= self.split < len(gens)):
            raise ValidationError(f"split must lie in [1, {len(gens) - 1}], got {self.split}")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "angles", angles)

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]

    def factors(self) -> list[np.ndarray]:
        return [expm_hermitian(g, t) for g, t in zip(self.generators, self.angles)]

    def with_angle(self, k: int, value: float) -> "ParamUnitarySite":
        angles = list(self.angles)
        angles[k] = value
        return ParamUnitarySite(self.generators, tuple(angles), self.split)

    def halves(self) -> tuple[np.ndarray, np.ndarray]:
        """(U_minus, U_plus)."""
        f = self.factors()
        eye = np.eye(self.dim, dtype=np.complex128)
        u_minus = _chain(f[: self.split], eye)
        u_plus = _chain(f[self.split:], eye)
        return u_minus, u_plus


def _chain(mats, eye):
    out = eye
    for m in mats:
        out = out @ m
    return out


@dataclass(frozen=True)
class HaarSplitSite:
    """Site unitary U = u_minus @ u_plus with a fixed derivative direction.

    The derivative is taken with respect to an angle inserted between the
    halves, U(t) = u_minus exp(i t G) u_plus at t = 0.
    """

    u_minus: np.ndarray
    u_plus: np.ndarray
    generator: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u_minus", check_unitary(self.u_minus, "u_minus"))
        object.__setattr__(self, "u_plus", check_unitary(self.u_plus, "u_plus"))
        object.__setattr__(self, "generator", check_hermitian(self.generator))

    @property
    def dim(self) -> int:
        return self.u_minus.shape[0]

    def unitary(self, angle: float = 0.0) -> np.ndarray:
        return self.u_minus @ expm_hermitian(self.generator, angle) @ self.u_plus

    def derivative(self) -> np.ndarray:
        return 1j * self.u_minus @ self.generator @ self.u_plus


def build_unitary(site: ParamUnitarySite) -> np.ndarray:
    """Product of the site's matrix exponentials in generator order."""
    eye = np.eye(site.dim, dtype=np.complex128)
    return _chain(site.factors(), eye)


def derivative_factors(site: ParamUnitarySite, k: int):
    """Split dU/d(theta_k) as ``1j * left @ G_k @ right``.

    ``k`` is 1-based. ``left`` contains factors 1..k (the k-th exponential
    included) and ``right`` factors k+1..L, so ``left @ right`` rebuilds U.
    """
    L = len(site.generators)
    if not (1 <= k <= L):
        raise ValidationError(f"parameter index {k} outside [1, {L}]")
    f = site.factors()
    eye = np.eye(site.dim, dtype=np.complex128)
    left = _chain(f[:k], eye)
    right = _chain(f[k:], eye)
    return left, site.generators[k - 1], right


def random_param_site(N: int, rng=None, generators=None, split: int | None = None) -> ParamUnitarySite:
    """Site over the full Gell-Mann basis with angles uniform on [-pi, pi)."""
    rng = check_random_state(rng)
    gens = tuple(hermitian_basis(N) if generators is None else generators)
    angles = rng.uniform(-np.pi, np.pi, len(gens))
    if split is None:
        split = max(1, len(gens) // 2)
    return ParamUnitarySite(gens, tuple(angles), split)

"""Periodic-boundary matrix product states.

Site tensors have shape ``(d, D, D)`` and the amplitude of ``|j_1 ... j_n>``
is ``Tr[A^(1)_{j_1} ... A^(n)_{j_n}]``.

Embedding convention: a ``Dd x Dd`` unitary acts on the composite index
``p * D + b`` (physical slot ``p`` first, bond ``b`` second). The site tensor
is ``A_j[l, r] = <j, r| U |0, l>`` i.e. ``U[j * D + r, l]``.

Site indices in the public API are 1-based, matching ``LocalObservable.site``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateStateError, DimensionError, SizeGuardError, ValidationError
from .validation import check_hermitian, check_positive_int, check_random_state, check_unitary

__all__ = [
    "MpsState",
    "LocalObservable",
    "embed_unitary_mps",
    "site_from_unitary",
    "random_raw_mps",
    "transfer_matrix",
    "ring_trace",
    "inner_product",
    "norm_sq",
    "local_expectation",
    "to_statevector",
    "DEGENERATE_NORM",
    "STATEVECTOR_LIMIT",
]

DEGENERATE_NORM = 1e-14
STATEVECTOR_LIMIT = 2 ** 20


@dataclass(frozen=True)
class MpsState:
    """n site tensors of shape (d, D, D) closed by a trace.

    ``units`` holds the source unitaries when the state was built by
    :func:`embed_unitary_mps`; it is ``None`` for raw states.
    """

    sites: tuple
    units: tuple | None = None

    def __post_init__(self):
        sites = tuple(np.array(a, dtype=np.complex128) for a in self.sites)
        if not sites:
            raise ValidationError("an MPS needs at least one site")
        shape = sites[0].shape
        if len(shape) != 3 or shape[1] != shape[2]:
            raise DimensionError(f"site tensors must have shape (d, D, D), got {shape}")
        for k, a in enumerate(sites):
            if a.shape != shape:
                raise DimensionError(f"site {k + 1} has shape {a.shape}, expected {shape}")
            a.setflags(write=False)
        object.__setattr__(self, "sites", sites)

    @property
    def n(self) -> int:
        return len(self.sites)

    @property
    def d(self) -> int:
        return self.sites[0].shape[0]

    @property
    def D(self) -> int:
        return self.sites[0].shape[1]

    @property
    def origin(self) -> str:
        return "raw" if self.units is None else "embedded"

    def as_array(self) -> np.ndarray:
        """Stacked site tensors, shape (n, d, D, D)."""
        return np.stack(self.sites)

    def replace_site(self, site: int, tensor) -> "MpsState":
        """Copy with the 1-based ``site`` tensor swapped; drops ``units``."""
        sites = list(self.sites)
        sites[site - 1] = tensor
        return MpsState(tuple(sites))

    def scaled(self, factor) -> "MpsState":
        """Every amplitude multiplied by ``factor`` (applied to site 1)."""
        return self.replace_site(1, self.sites[0] * factor)


@dataclass(frozen=True)
class LocalObservable:
    """A d x d Hermitian operator acting on 1-based ``site``."""

    matrix: np.ndarray
    site: int

    def __post_init__(self):
        object.__setattr__(self, "matrix", check_hermitian(self.matrix, "observable"))
        check_positive_int(self.site, "observable site")

    @property
    def traceless(self) -> bool:
        return bool(abs(np.trace(self.matrix)) < 1e-12)


def site_from_unitary(U: np.ndarray, d: int, D: int) -> np.ndarray:
    """Extract ``A_j[l, r] = U[j*D + r, l]``; leading batch axes are kept."""
    U = np.asarray(U)
    cols = U[..., :, :D]  # inputs |0, l>
    return np.swapaxes(cols.reshape(U.shape[:-2] + (d, D, D)), -1, -2)


def embed_unitary_mps(units: Sequence[np.ndarray], d: int, D: int) -> MpsState:
    """Build the MPS whose site tensors are blocks of the given unitaries."""
    d = check_positive_int(d, "d")
    D = check_positive_int(D, "D")
    checked = []
    for k, u in enumerate(units):
        u = check_unitary(u, f"unit {k + 1}")
        if u.shape[0] != d * D:
            raise DimensionError(f"unit {k + 1} has size {u.shape[0]}, expected D*d = {d * D}")
        checked.append(u)
    sites = tuple(site_from_unitary(u, d, D) for u in checked)
    return MpsState(sites, units=tuple(checked))


def random_raw_mps(n: int, d: int, D: int, rng=None, complex_entries: bool = True) -> MpsState:
    """Entries (real and imaginary parts) independently uniform on [-0.5, 0.5]."""
    rng = check_random_state(rng)
    shape = (n, d, D, D)
    a = rng.uniform(-0.5, 0.5, shape)
    if complex_entries:
        a = a + 1j * rng.uniform(-0.5, 0.5, shape)
    return MpsState(tuple(a))


def transfer_matrix(A, B=None, op=None) -> np.ndarray:
    """Mixed transfer matrix ``sum_{j,j'} op[j', j] A_j (x) conj(B_j')``.

    Rows are ``(l, l')`` and columns ``(r, r')``. ``A`` and ``B`` may have
    different bond dimensions and share any leading batch axes.
    """
    A = np.asarray(A)
    B = A if B is None else np.asarray(B)
    if op is None:
        t = np.einsum("...jab,...jcd->...acbd", A, B.conj())
    else:
        t = np.einsum("kj,...jab,...kcd->...acbd", op, A, B.conj())
    Da, Db = A.shape[-1], B.shape[-1]
    return t.reshape(t.shape[:-4] + (Da * Db, Da * Db))


def ring_trace(mats) -> complex:
    """Trace of the ordered product of square matrices (leading batch axes allowed)."""
    mats = list(mats)
    prod = mats[0]
    for m in mats[1:]:
        prod = prod @ m
    return np.trace(prod, axis1=-2, axis2=-1)


def _check_compatible(psi: MpsState, phi: MpsState):
    if psi.n != phi.n or psi.d != phi.d:
        raise DimensionError(
            f"states differ in size: (n={psi.n}, d={psi.d}) vs (n={phi.n}, d={phi.d})")


def inner_product(psi: MpsState, phi: MpsState) -> complex:
    """<phi|psi> by sequential transfer-matrix multiplication."""
    _check_compatible(psi, phi)
    return complex(ring_trace(transfer_matrix(a, b) for a, b in zip(psi.sites, phi.sites)))


def norm_sq(psi: MpsState) -> float:
    """<psi|psi>; an imaginary residue above 1e-10 is reported as an error."""
    z = inner_product(psi, psi)
    if abs(z.imag) > 1e-10 * max(1.0, abs(z.real)):
        raise ArithmeticError(f"norm has imaginary part {z.imag:.3e}")
    return z.real


def _expectation_numerator(psi: MpsState, op: np.ndarray, site: int) -> complex:
    mats = [transfer_matrix(a) for a in psi.sites]
    mats[site - 1] = transfer_matrix(psi.sites[site - 1], op=op)
    return complex(ring_trace(mats))


def local_expectation(psi: MpsState, obs: LocalObservable) -> float:
    """<psi|O_m|psi> / <psi|psi>."""
    if not 1 <= obs.site <= psi.n:
        raise ValidationError(f"observable site {obs.site} outside [1, {psi.n}]")
    if obs.matrix.shape != (psi.d, psi.d):
        raise DimensionError(f"observable must be {psi.d}x{psi.d}")
    z = norm_sq(psi)
    if z < DEGENERATE_NORM:
        raise DegenerateStateError(f"norm {z:.3e} below {DEGENERATE_NORM}")
    num = _expectation_numerator(psi, obs.matrix, obs.site)
    return num.real / z


def to_statevector(psi: MpsState) -> np.ndarray:
    """Dense amplitudes in lexicographic order of (j_1, ..., j_n)."""
    if psi.d ** psi.n > STATEVECTOR_LIMIT:
        raise SizeGuardError(f"d**n = {psi.d ** psi.n} exceeds {STATEVECTOR_LIMIT}")
    # running tensor indexed (j_1..j_k, l_1, r_k)
    acc = psi.sites[0]
    for a in psi.sites[1:]:
        acc = np.einsum("...lk,jkr->...jlr", acc, a)
    return np.trace(acc, axis1=-2, axis2=-1).reshape(-1)

"""Weingarten functions and exact Haar moment tensors of U(N).

For t copies of a Haar unitary,

    E[prod_l U[i_l, j_l] conj(U[i'_l, j'_l])]
        = sum_{sigma, tau} prod_l delta(i_l, i'_sigma(l)) delta(j_l, j'_tau(l))
          * Wg(tau sigma^-1, N).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial

import numpy as np

from ..errors import DegenerateRegimeError, ValidationError
from ..tensor_core import DenseTensor
from ..validation import check_positive_int
from .symmetric import Partition, Perm, all_perms, character, hook_dimension, partitions_of, schur_dimension

__all__ = ["weingarten", "weingarten_by_type", "MomentTensor", "moment_tensor", "gram_matrix"]

MAX_ORDER = 2


def weingarten(sigma: Perm, N: int, t: int | None = None) -> Fraction:
    """Exact Wg(sigma, N) from the character expansion.

    Only the regime N >= t (where the Gram matrix is invertible) is supported.
    """
    t = sigma.degree if t is None else t
    if sigma.degree != t:
        raise ValidationError(f"permutation has degree {sigma.degree}, expected t = {t}")
    return weingarten_by_type(sigma.cycle_type, N)


def weingarten_by_type(cycle_type: Partition, N: int) -> Fraction:
    N = check_positive_int(N, "N")
    return _wg(cycle_type.parts, N)


@lru_cache(maxsize=None)
def _wg(rho: tuple, N: int) -> Fraction:
    t = sum(rho)
    if N < t:
        raise DegenerateRegimeError(f"N = {N} < t = {t}: Weingarten regime not supported")
    cls = Partition(rho)
    total = Fraction(0)
    for eta in partitions_of(t):
        dim = hook_dimension(eta)
        total += Fraction(dim * dim * character(eta, cls)) / schur_dimension(eta, N)
    return total / factorial(t) ** 2


def gram_matrix(t: int, N: int) -> list[list[int]]:
    """G[sigma][tau] = N ** cycles(sigma^-1 tau) over S_t in ``all_perms`` order."""
    perms = all_perms(t)
    return [[N ** s.inverse().compose(p).num_cycles for p in perms] for s in perms]


@dataclass(frozen=True)
class MomentTensor:
    """Exact t-th Haar moment of U(N).

    ``data`` has rank 4t with axes grouped per copy as (i, j, i', j'), so the
    entry at (i_1, j_1, i'_1, j'_1, ..., i_t, j_t, i'_t, j'_t) equals
    E[prod U[i, j] conj(U[i', j'])].
    """

    order: int
    N: int
    data: DenseTensor

    def kron_matrix(self) -> np.ndarray:
        """E[U^(x t) (x) conj(U)^(x t)] as an N^2t x N^2t matrix.

        Rows are (i_1..i_t, i'_1..i'_t) and columns (j_1..j_t, j'_1..j'_t).
        """
        return _kron(self.order, self.N)

    def entry(self, i, j, ip, jp) -> float:
        return float(self.kron_matrix()[_flat(tuple(i) + tuple(ip), self.N),
                                        _flat(tuple(j) + tuple(jp), self.N)].real)


def _flat(idx, N):
    out = 0
    for v in idx:
        out = out * N + v
    return out


@lru_cache(maxsize=8)
def _kron(t: int, N: int) -> np.ndarray:
    perms = all_perms(t)
    # bit k of the mask marks that index tuple (i, i') matches pattern sigma_k
    idx = np.array(list(product(range(N), repeat=2 * t)))
    masks = np.zeros(len(idx), dtype=np.int64)
    for k, s in enumerate(perms):
        ok = np.ones(len(idx), dtype=bool)
        for lam in range(t):
            ok &= idx[:, lam] == idx[:, t + s(lam)]
        masks |= ok.astype(np.int64) << k
    wg = {(a, b): weingarten(b.compose(a.inverse()), N) for a in perms for b in perms}
    nmask = 1 << len(perms)
    table = np.zeros((nmask, nmask))
    for ra in range(nmask):
        for cb in range(nmask):
            val = sum((wg[(perms[a], perms[b])]
                       for a in range(len(perms)) if ra >> a & 1
                       for b in range(len(perms)) if cb >> b & 1), Fraction(0))
            table[ra, cb] = float(val)
    k = table[masks[:, None], masks[None, :]].astype(np.complex128)
    k.setflags(write=False)
    return k


def moment_tensor(N: int, t: int) -> MomentTensor:
    """Materialize the exact t-th moment (t in {1, 2}) in double precision."""
    N = check_positive_int(N, "N")
    t = check_positive_int(t, "t")
    if t > MAX_ORDER:
        raise ValidationError(f"moment tensors are available for t <= {MAX_ORDER}, got {t}")
    if N < t:
        raise DegenerateRegimeError(f"N = {N} < t = {t}: Weingarten regime not supported")
    k = _kron(t, N)
    # (i_1..i_t, i'_1..i'_t, j_1..j_t, j'_1..j'_t) -> per copy (i, j, i', j')
    arr = k.reshape((N,) * (4 * t))
    perm = []
    for lam in range(t):
        perm += [lam, 2 * t + lam, t + lam, 3 * t + lam]
    return MomentTensor(t, N, DenseTensor(arr.transpose(perm)))

"""Exact Haar averages of the split-unitary gradient for small systems.

Every site unitary is Haar random; the derivative site is U = u_minus
exp(i t G) u_plus with independent Haar halves, differentiated at t = 0.
The derivative of the (unnormalized) loss is a sum of two bilinear forms,

    dL = s * (<psi|Q|dpsi> + <dpsi|Q|psi>),

with Q = |phi><phi| (s = -1) for the global fidelity and Q = O_m (s = +1)
for the local expectation numerator. Raising dL to the power t and taking
the Haar average replaces each unitary's t copies of U (x) conj(U) by the
exact moment matrix; the remaining network is a ring of per-site transfer
matrices that is traced exactly.
"""
from __future__ import annotations

import numpy as np

from ..config import ExperimentConfig
from ..errors import SizeGuardError, UnsupportedModeError, ValidationError
from ..mps import ring_trace
from ..validation import check_hermitian
from .moments import moment_tensor

__all__ = ["exact_grad_mean", "exact_grad_variance", "oracle_loss_kind", "ORACLE_LIMIT"]

ORACLE_LIMIT = 2 ** 16

_KIND = {
    "fidelity": "fidelity",
    "normalized": "fidelity",
    "local": "local_numerator",
    "local_numerator": "local_numerator",
}


def oracle_loss_kind(loss: str) -> str:
    """Unnormalized loss whose gradient moments the oracle computes."""
    if loss not in _KIND:
        raise UnsupportedModeError(f"no polynomial form for loss {loss!r}")
    return _KIND[loss]


def _check(cfg: ExperimentConfig):
    if cfg.d ** cfg.n > ORACLE_LIMIT:
        raise SizeGuardError(f"d**n = {cfg.d ** cfg.n} exceeds oracle limit {ORACLE_LIMIT}")
    if cfg.grad_site == "all":
        raise ValidationError("the oracle needs a single derivative site")
    return oracle_loss_kind(cfg.loss)


def _site_operators(cfg: ExperimentConfig, kind: str) -> list[np.ndarray]:
    """Per-site Q[j', j, L, R] for one replica; L, R are bond pairs."""
    d = cfg.d
    if kind == "fidelity":
        out = []
        for f in cfg.target_state().mps.sites:
            chi = f.shape[-1]
            q = np.einsum("pab,jce->pjacbe", f, f.conj())
            out.append(q.reshape(d, d, chi * chi, chi * chi))
        return out
    eye = np.eye(d, dtype=np.complex128)[:, :, None, None]
    out = [eye] * cfg.n
    out[cfg.m - 1] = cfg.local_observable().matrix[:, :, None, None]
    return out


def _letters():
    return iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")


def _site_transfer(avg: np.ndarray, q: np.ndarray, t: int, d: int, D: int) -> np.ndarray:
    """Contract an averaged site block with Q on each replica.

    ``avg`` is N^2t x N^2t with copy order (ket_1..ket_t, bra_1..bra_t) on
    both sides. The returned matrix maps left bonds
    (l_ket.., l_bra.., L_1..L_t) to right bonds (r_ket.., r_bra.., R_1..R_t).
    """
    c = 2 * t
    tens = avg.reshape((d, D) * c + (d, D) * c)
    tens = tens[(slice(None),) * (2 * c) + (0, slice(None)) * c]  # input physical slot = |0>
    let = _letters()
    j = [next(let) for _ in range(c)]
    r = [next(let) for _ in range(c)]
    l = [next(let) for _ in range(c)]
    L = [next(let) for _ in range(t)]
    R = [next(let) for _ in range(t)]
    src = "".join(j[k] + r[k] for k in range(c)) + "".join(l)
    qs = [j[t + lam] + j[lam] + L[lam] + R[lam] for lam in range(t)]
    out = "".join(l) + "".join(L) + "".join(r) + "".join(R)
    res = np.einsum(",".join([src] + qs) + "->" + out, tens, *([q] * t))
    side = D ** c * q.shape[2] ** t
    return res.reshape(side, side)


def _derivative_insertion(g: np.ndarray, t: int) -> np.ndarray:
    """Sum over which factor (ket or bra) carries iG, for each of t replicas."""
    N = g.shape[0]
    eye = np.eye(N, dtype=np.complex128)
    ig = 1j * g
    y = np.kron(ig, eye) + np.kron(eye, ig.conj())  # (ket, bra)
    if t == 1:
        return y
    yy = np.kron(y, y).reshape((N,) * 8)  # (k1, b1, k2, b2) rows and cols
    order = [0, 2, 1, 3, 4, 6, 5, 7]
    return yy.transpose(order).reshape(N ** 4, N ** 4)


def _moment(cfg: ExperimentConfig, t: int, generator) -> float:
    kind = _check(cfg)
    g = cfg.split_generator() if generator is None else check_hermitian(generator, "generator")
    if g.shape != (cfg.N, cfg.N):
        raise ValidationError(f"generator must be {cfg.N}x{cfg.N}")
    k = moment_tensor(cfg.N, t).kron_matrix()
    k_der = k @ _derivative_insertion(g, t) @ k
    qs = _site_operators(cfg, kind)
    i = int(cfg.grad_site) - 1
    mats = [_site_transfer(k_der if s == i else k, qs[s], t, cfg.d, cfg.D) for s in range(cfg.n)]
    sign = -1.0 if kind == "fidelity" else 1.0
    val = complex(ring_trace(mats))
    return sign ** t * val.real + 0.0


def exact_grad_mean(cfg: ExperimentConfig, generator=None) -> float:
    """Haar average of the gradient of the unnormalized loss."""
    return _moment(cfg, 1, generator)


def exact_grad_variance(cfg: ExperimentConfig, generator=None) -> float:
    """Haar variance of the gradient of the unnormalized loss."""
    mean = _moment(cfg, 1, generator)
    return _moment(cfg, 2, generator) - mean ** 2

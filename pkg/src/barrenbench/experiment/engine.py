"""Batched per-sample gradient evaluation.

Sample ``s`` of a run draws all of its randomness from
``np.random.default_rng([seed, s])``, so a sample's value does not depend on
which chunk or thread evaluates it.

Gradients use cyclic environments. For a real loss L of the site tensors,
dL = 2 Re sum(w * dA) where w is the derivative with respect to A at fixed
conj(A). The environment of site i is the ring product of every other
transfer matrix, so w at all sites costs O(n) matrix products.
"""
from __future__ import annotations

import numpy as np

from ..config import ExperimentConfig
from ..errors import DegenerateStateError, DivergenceError
from ..grad import StateConfig
from ..loss import KL_FLOOR
from ..mps import DEGENERATE_NORM, site_from_unitary
from ..unitary import HaarSplitSite, ParamUnitarySite, expm_hermitian, hermitian_basis, qr_haar

__all__ = ["CHUNK", "sample_rng", "draw_raw", "gradient_chunk", "sample_state", "direction_count", "loss_of"]

CHUNK = 1000


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def direction_count(cfg: ExperimentConfig) -> int:
    sites = cfg.n if cfg.grad_site == "all" else 1
    per = cfg.params_per_site if cfg.grad_index == "all" or cfg.mode == "haar_split" else 1
    return sites * per


# ---------------------------------------------------------------------------
# random draws
def draw_raw(cfg: ExperimentConfig, index: int) -> np.ndarray:
    """The sample's random numbers in the layout each mode consumes."""
    rng = sample_rng(cfg.seed, index)
    n, d, D, N = cfg.n, cfg.d, cfg.D, cfg.N
    if cfg.mode == "raw_tensor":
        shape = (n, d, D, D)
        a = rng.uniform(-0.5, 0.5, shape)
        if cfg.complex_raw:
            a = a + 1j * rng.uniform(-0.5, 0.5, shape)
        return a
    if cfg.mode == "theta":
        return rng.uniform(-np.pi, np.pi, (n, N * N))
    z = rng.standard_normal((n + 1, N, N, 2))  # n - 1 site unitaries + two halves
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


def _haar_units(cfg, ginibre):
    """(units, u_minus, u_plus) for a batch; units holds the assembled site unitaries."""
    q = qr_haar(ginibre)
    i = int(cfg.grad_site) - 1
    um, up = q[:, i], q[:, i + 1]
    units = np.concatenate([q[:, :i], (um @ up)[:, None], q[:, i + 2:]], axis=1)
    return units, um, up


def _theta_factors(cfg, angles):
    gens = hermitian_basis(cfg.N)
    # (S, n, L, N, N)
    return np.stack([expm_hermitian(g, angles[..., k]) for k, g in enumerate(gens)], axis=2), gens


def _chain(mats):
    out = mats[..., 0, :, :]
    for k in range(1, mats.shape[-3]):
        out = out @ mats[..., k, :, :]
    return out


def sample_state(cfg: ExperimentConfig, index: int) -> StateConfig:
    """The parameterized state of one sample, for cross-checks against ``grad``."""
    raw = draw_raw(cfg, index)
    if cfg.mode == "raw_tensor":
        return StateConfig("raw_tensor", cfg.d, cfg.D, tuple(raw))
    if cfg.mode == "theta":
        gens = tuple(hermitian_basis(cfg.N))
        split = max(1, len(gens) // 2)
        return StateConfig("theta", cfg.d, cfg.D,
                           tuple(ParamUnitarySite(gens, tuple(a), split) for a in raw))
    q = qr_haar(raw)
    i = int(cfg.grad_site) - 1
    g = cfg.split_generator()
    sites = list(q[:i]) + [HaarSplitSite(q[i], q[i + 1], g)] + list(q[i + 2:])
    return StateConfig("haar_split", cfg.d, cfg.D, tuple(sites))


# ---------------------------------------------------------------------------
# contractions
def _transfer(A, B, op=None):
    """Batched transfer matrices, A/B of shape (S, n, d, Da, Da)."""
    if op is None:
        t = np.einsum("snjab,snjcd->snacbd", A, B.conj())
    else:
        t = np.einsum("kj,snjab,snkcd->snacbd", op, A, B.conj())
    S, n, Da, Db = A.shape[0], A.shape[1], A.shape[-1], B.shape[-1]
    return t.reshape(S, n, Da * Db, Da * Db)


def _ring_envs(T):
    """Total ring trace and the cyclic environment of every site."""
    S, n, k, _ = T.shape
    eye = np.broadcast_to(np.eye(k, dtype=T.dtype), (S, k, k))
    prefix = [eye]
    for i in range(n - 1):
        prefix.append(prefix[-1] @ T[:, i])
    suffix = [None] * n
    acc = eye
    suffix[n - 1] = eye
    for i in range(n - 1, 0, -1):
        acc = T[:, i] @ acc
        suffix[i - 1] = acc
    total = np.trace(prefix[-1] @ T[:, n - 1], axis1=-2, axis2=-1)
    env = np.stack([suffix[i] @ prefix[i] for i in range(n)], axis=1)
    return total, env


def _w_overlap(F, env, D):
    """d<phi|psi>/dA; F is the target, env rows (r, b) and cols (l, a)."""
    S, n = env.shape[:2]
    chi = F.shape[-1]
    e = env.reshape(S, n, D, chi, D, chi)
    return np.einsum("njab,snrbla->snjlr", F.conj(), e)


def _w_norm(A, env, op=None, site=None):
    """d<psi|X|psi>/dA at fixed conj(A); X = op at ``site`` (0-based), else identity."""
    S, n, d, D, _ = A.shape
    e = env.reshape(S, n, D, D, D, D)  # (r, r', l, l')
    w = np.einsum("snjcd,snrdlc->snjlr", A.conj(), e)
    if op is not None:
        w[:, site] = np.einsum("kj,skcd,srdlc->sjlr", op, A[:, site].conj(), e[:, site])
    return w


def _loss_weights(cfg: ExperimentConfig, A: np.ndarray) -> np.ndarray:
    """w with dL = 2 Re sum(w * dA), shape (S, n, d, D, D)."""
    loss = cfg.loss
    if loss in ("local", "local_numerator"):
        obs = cfg.local_observable()
        num, env_n = _ring_envs(_transfer_with_op(A, obs.matrix, obs.site - 1))
        w_n = _w_norm(A, env_n, obs.matrix, obs.site - 1)
        if loss == "local_numerator":
            return w_n
        z, w_z = _norm_terms(A)
        num = num.real
        return w_n / z[:, None, None, None, None] - (num / z ** 2)[:, None, None, None, None] * w_z

    target = cfg.target_state()
    F = np.stack(target.mps.sites)
    Fb = np.broadcast_to(F, (A.shape[0],) + F.shape)
    ov, env_o = _ring_envs(_transfer(A, Fb))
    g = _w_overlap(F, env_o, cfg.D)
    b = (slice(None), None, None, None, None)
    if loss == "fidelity":
        return -np.conj(ov)[b] * g
    z, w_z = _norm_terms(A)
    p2 = np.abs(ov) ** 2
    if loss == "normalized":
        return -(np.conj(ov) / z)[b] * g + (p2 / z ** 2)[b] * w_z
    # kl
    if np.any(np.sqrt(p2 / z) / target.norm <= KL_FLOOR):
        raise DivergenceError("acceptance probability vanished in a sample")
    return -0.5 * (np.conj(ov) / p2)[b] * g + 0.5 / z[b] * w_z


def _transfer_with_op(A, op, site):
    T = _transfer(A, A)
    T[:, site] = _transfer(A[:, site:site + 1], A[:, site:site + 1], op)[:, 0]
    return T


def _norm_terms(A):
    z, env = _ring_envs(_transfer(A, A))
    z = z.real
    if np.any(z < DEGENERATE_NORM):
        raise DegenerateStateError("state norm below threshold in a sample")
    return z, _w_norm(A, env)


# ---------------------------------------------------------------------------
def gradient_chunk(cfg: ExperimentConfig, start: int, stop: int) -> np.ndarray:
    """Gradients of samples ``start..stop-1``, shape (stop - start, directions).

    Directions are ordered site-major, then parameter index.
    """
    raw = np.stack([draw_raw(cfg, s) for s in range(start, stop)])
    d, D = cfg.d, cfg.D
    sites = range(cfg.n) if cfg.grad_site == "all" else [int(cfg.grad_site) - 1]
    sites = list(sites)

    if cfg.mode == "raw_tensor":
        A = raw if cfg.complex_raw else raw.astype(np.complex128)
        w = _loss_weights(cfg, A)[:, sites]
        if cfg.complex_raw:
            grads = np.stack([2.0 * w.real, -2.0 * w.imag], axis=-1)
        else:
            grads = 2.0 * w.real
        grads = grads.reshape(len(raw), len(sites), -1)
    elif cfg.mode == "haar_split":
        units, um, up = _haar_units(cfg, raw)
        A = site_from_unitary(units, d, D)
        w = _loss_weights(cfg, A)[:, sites[0]]
        g = cfg.split_generator()
        dA = site_from_unitary(1j * um @ g @ up, d, D)
        grads = 2.0 * np.einsum("sjlr,sjlr->s", w, dA).real[:, None, None]
    else:
        factors, gens = _theta_factors(cfg, raw)
        units = _chain(factors)
        A = site_from_unitary(units, d, D)
        w = _loss_weights(cfg, A)
        per_site = []
        for i in sites:
            f = factors[:, i]
            L = len(gens)
            left = [f[:, 0]]
            for k in range(1, L):
                left.append(left[-1] @ f[:, k])
            right = [None] * L
            eye = np.broadcast_to(np.eye(cfg.N, dtype=np.complex128), f[:, 0].shape)
            right[L - 1] = eye
            for k in range(L - 1, 0, -1):
                right[k - 1] = f[:, k] @ right[k]
            du = np.stack([1j * left[k] @ gens[k] @ right[k] for k in range(L)], axis=1)
            dA = site_from_unitary(du, d, D)
            per_site.append(2.0 * np.einsum("sjlr,skjlr->sk", w[:, i], dA).real)
        grads = np.stack(per_site, axis=1)

    if cfg.mode != "haar_split" and cfg.grad_index != "all":
        grads = grads[:, :, int(cfg.grad_index) - 1:int(cfg.grad_index)]
    return np.ascontiguousarray(grads.reshape(len(raw), -1))


def loss_of(cfg: ExperimentConfig):
    """The :class:`~barrenbench.loss.Loss` a configuration describes."""
    from ..loss import Loss
    if cfg.loss in ("local", "local_numerator"):
        return Loss(cfg.loss, observable=cfg.local_observable())
    return Loss(cfg.loss, target=cfg.target_state())

"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""
from __future__ import annotations

import numbers

import numpy as np

from .errors import ValidationError

UNITARY_ATOL = 1e-10
HERMITIAN_ATOL = 1e-12


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValidationError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_square(matrix, name: str = "matrix") -> np.ndarray:
    m = np.asarray(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {m.shape}")
    return m


def is_unitary(matrix, atol: float = UNITARY_ATOL) -> bool:
    m = np.asarray(matrix)
    return bool(np.allclose(m @ m.conj().T, np.eye(m.shape[0]), rtol=0, atol=atol))


def is_hermitian(matrix, atol: float = HERMITIAN_ATOL) -> bool:
    m = np.asarray(matrix)
    return bool(np.allclose(m, m.conj().T, rtol=0, atol=atol))


def check_unitary(matrix, name: str = "unitary", atol: float = UNITARY_ATOL) -> np.ndarray:
    m = check_square(matrix, name)
    if not is_unitary(m, atol):
        err = np.abs(m @ m.conj().T - np.eye(m.shape[0])).max()
        raise ValidationError(f"{name} is not unitary (max |UU^dag - I| = {err:.3e})")
    return m


def check_hermitian(matrix, name: str = "generator", atol: float = HERMITIAN_ATOL) -> np.ndarray:
    m = check_square(matrix, name)
    if not is_hermitian(m, atol):
        raise ValidationError(f"{name} is not Hermitian")
    return m


def check_random_state(seed) -> np.random.Generator:
    """Turn ``None``, an int, a seed sequence or a Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)

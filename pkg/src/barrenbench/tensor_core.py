"""Dense complex tensors and pairwise contraction.

Storage is a row-major ``complex128`` numpy array. Axis labels are carried
along as metadata but every operation is positional.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, ValidationError

__all__ = ["DenseTensor", "as_tensor", "contract", "transpose", "reshape"]


class DenseTensor:
    """Immutable complex tensor with optional per-axis labels.

    Parameters
    ----------
    data : array_like
        Values; converted to ``complex128``. If ``shape`` is given, ``data``
        is interpreted as a flat row-major sequence.
    shape : sequence of int, optional
    labels : sequence of str, optional
    """

    __slots__ = ("_data", "labels")

    def __init__(self, data, shape: Sequence[int] | None = None,
                 labels: Sequence[str] | None = None):
        arr = np.array(data, dtype=np.complex128)
        if shape is not None:
            shape = tuple(int(s) for s in shape)
            if any(s <= 0 for s in shape):
                raise DimensionError(f"axis lengths must be positive, got {shape}")
            if arr.size != int(np.prod(shape, dtype=np.int64)):
                raise DimensionError(
                    f"data has {arr.size} entries but shape {shape} needs "
                    f"{int(np.prod(shape))}")
            arr = arr.reshape(shape)
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != arr.ndim:
                raise ValidationError("one label per axis is required")
        arr.setflags(write=False)
        self._data = arr
        self.labels = labels

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the values."""
        return self._data

    @property
    def shape(self) -> tuple[int, ...]:
        return self._data.shape

    @property
    def ndim(self) -> int:
        return self._data.ndim

    @property
    def data(self) -> np.ndarray:
        """Flat row-major values."""
        return self._data.ravel()

    def conj(self) -> "DenseTensor":
        return DenseTensor(self._data.conj(), labels=self.labels)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data
        return self._data.astype(dtype)

    def __add__(self, other):
        return DenseTensor(self._data + as_tensor(other).array)

    def __mul__(self, scalar):
        return DenseTensor(self._data * scalar, labels=self.labels)

    __rmul__ = __mul__

    def __repr__(self):
        return f"DenseTensor(shape={self.shape}, labels={self.labels})"


def as_tensor(a) -> DenseTensor:
    if isinstance(a, DenseTensor):
        return a
    return DenseTensor(a)


def contract(a, b, pairs: Iterable[tuple[int, int]]) -> DenseTensor:
    """Sum over paired axes of ``a`` and ``b``.

    The result keeps the unpaired axes of ``a`` followed by those of ``b``,
    each in original order.
    """
    a, b = as_tensor(a), as_tensor(b)
    pairs = [(int(i), int(j)) for i, j in pairs]
    ax_a = [i for i, _ in pairs]
    ax_b = [j for _, j in pairs]
    if len(set(ax_a)) != len(ax_a) or len(set(ax_b)) != len(ax_b):
        raise ValueError("an axis may appear in at most one pair")
    for i, j in pairs:
        if not (0 <= i < a.ndim and 0 <= j < b.ndim):
            raise ValueError(f"axis pair {(i, j)} out of range for ranks {a.ndim}, {b.ndim}")
        if a.shape[i] != b.shape[j]:
            raise DimensionError(
                f"cannot pair axis {i} (len {a.shape[i]}) with axis {j} (len {b.shape[j]})")
    free_a = [i for i in range(a.ndim) if i not in ax_a]
    free_b = [j for j in range(b.ndim) if j not in ax_b]
    k = int(np.prod([a.shape[i] for i in ax_a], dtype=np.int64))
    # transpose + reshape + matmul
    ma = np.transpose(a.array, free_a + ax_a).reshape(-1, k)
    mb = np.transpose(b.array, ax_b + free_b).reshape(k, -1)
    out_shape = [a.shape[i] for i in free_a] + [b.shape[j] for j in free_b]
    labels = None
    if a.labels is not None and b.labels is not None:
        labels = [a.labels[i] for i in free_a] + [b.labels[j] for j in free_b]
    return DenseTensor((ma @ mb).reshape(out_shape), labels=labels)


def transpose(a, perm: Sequence[int]) -> DenseTensor:
    """Permute axes: result axis ``k`` is input axis ``perm[k]``."""
    a = as_tensor(a)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(a.ndim)):
        raise ValueError(f"{perm} is not a permutation of {a.ndim} axes")
    labels = None if a.labels is None else [a.labels[p] for p in perm]
    return DenseTensor(np.transpose(a.array, perm), labels=labels)


def reshape(a, new_shape: Sequence[int]) -> DenseTensor:
    """Row-major reshape; the flat data order is unchanged."""
    a = as_tensor(a)
    new_shape = tuple(int(s) for s in new_shape)
    if int(np.prod(new_shape, dtype=np.int64)) != int(np.prod(a.shape, dtype=np.int64)):
        raise DimensionError(f"cannot reshape {a.shape} into {new_shape}")
    return DenseTensor(a.array.reshape(new_shape))

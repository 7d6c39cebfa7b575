"""Partitions, permutations and irreducible characters of the symmetric group.

All quantities are exact: integers or :class:`fractions.Fraction`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import factorial, prod

from ..errors import RepresentationVanishesError, ValidationError

__all__ = [
    "Partition",
    "Perm",
    "partitions_of",
    "hook_dimension",
    "schur_dimension",
    "character",
    "all_perms",
]


@dataclass(frozen=True, order=True)
class Partition:
    """Non-increasing tuple of positive integers."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise ValidationError(f"parts must be positive, got {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValidationError(f"parts must be non-increasing, got {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def total(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > i) for i in range(self.parts[0])))

    def __repr__(self) -> str:
        return f"Partition{self.parts}"


@dataclass(frozen=True)
class Perm:
    """Permutation of {0, ..., t-1} stored by its images.

    ``compose(other)`` is ``self o other``: ``x -> self(other(x))``.
    """

    images: tuple

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise ValidationError(f"not a permutation of 0..{len(images) - 1}: {images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, t: int) -> "Perm":
        return cls(tuple(range(t)))

    @classmethod
    def transposition(cls, t: int, a: int, b: int) -> "Perm":
        images = list(range(t))
        images[a], images[b] = b, a
        return cls(tuple(images))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def compose(self, other: "Perm") -> "Perm":
        if other.degree != self.degree:
            raise ValidationError("permutations of different degree")
        return Perm(tuple(self.images[i] for i in other.images))

    def inverse(self) -> "Perm":
        inv = [0] * self.degree
        for i, v in enumerate(self.images):
            inv[v] = i
        return Perm(tuple(inv))

    def cycles(self) -> list[tuple]:
        seen, out = set(), []
        for start in range(self.degree):
            if start in seen:
                continue
            cyc, x = [], start
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = self.images[x]
            out.append(tuple(cyc))
        return out

    @property
    def num_cycles(self) -> int:
        return len(self.cycles())

    @property
    def cycle_type(self) -> Partition:
        return Partition(tuple(sorted((len(c) for c in self.cycles()), reverse=True)))


def all_perms(t: int) -> list[Perm]:
    """Every element of S_t, images in lexicographic order."""
    return [Perm(p) for p in permutations(range(t))]


def partitions_of(t: int) -> list[Partition]:
    """All partitions of t, largest first part first (reverse lexicographic)."""
    if isinstance(t, bool) or not isinstance(t, int) or t < 1:
        raise ValidationError(f"t must be a positive integer, got {t!r}")
    return [Partition(p) for p in _partitions(t, t)]


@lru_cache(maxsize=None)
def _partitions(t: int, largest: int) -> tuple:
    if t == 0:
        return ((),)
    out = []
    for first in range(min(t, largest), 0, -1):
        for rest in _partitions(t - first, first):
            out.append((first,) + rest)
    return tuple(out)


def hook_dimension(eta: Partition) -> int:
    """Dimension of the S_t irrep eta by the hook length formula."""
    conj = eta.conjugate().parts
    hooks = prod(eta.parts[i] - j + conj[j] - i - 1
                 for i in range(len(eta)) for j in range(eta.parts[i]))
    return factorial(eta.total) // hooks


def schur_dimension(eta: Partition, N: int) -> Fraction:
    """Dimension of the U(N) irrep with highest weight eta (Weyl product)."""
    if len(eta) > N:
        raise RepresentationVanishesError(f"length {len(eta)} exceeds N = {N}")
    lam = list(eta.parts) + [0] * (N - len(eta))
    value = Fraction(1)
    for i in range(N):
        for j in range(i + 1, N):
            value *= Fraction(lam[i] - lam[j] + j - i, j - i)
    return value


def character(eta: Partition, sigma: Perm | Partition) -> int:
    """chi^eta at a permutation (or cycle type) by the Murnaghan-Nakayama rule."""
    rho = sigma.cycle_type if isinstance(sigma, Perm) else sigma
    if rho.total != eta.total:
        raise ValidationError(f"degree mismatch: |eta| = {eta.total}, |sigma| = {rho.total}")
    return _mn(eta.parts, rho.parts)


@lru_cache(maxsize=None)
def _mn(lam: tuple, rho: tuple) -> int:
    if not rho:
        return 1
    r, rest = rho[0], rho[1:]
    # beta-set: removing an r-rim hook moves one bead from b to b - r
    L = len(lam)
    beta = [lam[i] + (L - 1 - i) for i in range(L)]
    beads = set(beta)
    total = 0
    for b in beta:
        nb = b - r
        if nb < 0 or nb in beads:
            continue
        height = sum(1 for c in beta if nb < c < b)
        new = sorted((beads - {b}) | {nb}, reverse=True)
        parts = tuple(v - (L - 1 - i) for i, v in enumerate(new))
        parts = tuple(p for p in parts if p > 0)
        total += (-1) ** height * _mn(parts, rest)
    return total

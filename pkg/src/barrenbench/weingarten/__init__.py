"""Exact Haar-moment machinery for U(N)."""
from .moments import MomentTensor, gram_matrix, moment_tensor, weingarten, weingarten_by_type
from .oracle import ORACLE_LIMIT, exact_grad_mean, exact_grad_variance, oracle_loss_kind
from .symmetric import (
    Partition,
    Perm,
    all_perms,
    character,
    hook_dimension,
    partitions_of,
    schur_dimension,
)

__all__ = [
    "Partition", "Perm", "all_perms", "partitions_of", "hook_dimension", "schur_dimension",
    "character", "weingarten", "weingarten_by_type", "gram_matrix", "MomentTensor",
    "moment_tensor", "exact_grad_mean", "exact_grad_variance", "oracle_loss_kind",
    "ORACLE_LIMIT",
]

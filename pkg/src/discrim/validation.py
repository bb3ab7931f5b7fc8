"""Input checking for array-shaped user data.

These helpers turn loosely typed inputs (lists, stacks of kets, unnormalized
weights) into the arrays the core routines expect, in the spirit of
``sklearn.utils.check_array``.
"""

from __future__ import annotations

import numpy as np

from .ensemble import Ensemble
from .exceptions import ValidationError
from .linalg import hermitize, is_hermitian


def check_states(X, *, allow_vectors: bool = True) -> np.ndarray:
    """Return a ``(n, d, d)`` complex stack of density matrices.

    A 2-D input ``(n, d)`` is read as `n` state vectors (normalized here)
    when `allow_vectors` is true.
    """
    arr = np.asarray(X, dtype=complex)
    if arr.ndim == 2 and allow_vectors:
        norms = np.linalg.norm(arr, axis=1)
        if np.any(norms == 0):
            raise ValidationError(f"state vector {int(np.argmin(norms))} is zero")
        arr = arr / norms[:, None]
        arr = np.einsum("ni,nj->nij", arr, arr.conj())
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ValidationError(
            f"expected density matrices of shape (n, d, d) or kets (n, d), got {np.shape(X)}"
        )
    if arr.shape[0] == 0:
        raise ValidationError("need at least one state")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("states have non-finite entries")
    for i, r in enumerate(arr):
        if not is_hermitian(r):
            raise ValidationError(f"state {i}: not Hermitian")
    return np.stack([hermitize(r) for r in arr])


def check_weights(sample_weight, n: int) -> np.ndarray:
    """Non-negative weights of length `n`, rescaled to sum to one."""
    if sample_weight is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(sample_weight, dtype=float).ravel()
    if w.shape != (n,):
        raise ValidationError(f"sample_weight has length {w.size}, expected {n}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValidationError("sample_weight must be finite and non-negative")
    total = w.sum()
    if not total > 0:
        raise ValidationError("sample_weight sums to zero")
    return w / total


def check_labels(y, n: int) -> np.ndarray:
    if y is None:
        return np.arange(n)
    y = np.asarray(y)
    if y.shape != (n,):
        raise ValidationError(f"y has shape {y.shape}, expected ({n},)")
    if len(np.unique(y)) != n:
        raise ValidationError("each state needs its own label; y has repeats")
    return y


def make_ensemble(X, y=None, sample_weight=None) -> tuple[Ensemble, np.ndarray]:
    """Build an :class:`Ensemble` and the label array from estimator inputs."""
    states = check_states(X)
    labels = check_labels(y, states.shape[0])
    weights = check_weights(sample_weight, states.shape[0])
    e = Ensemble(weights, list(states), labels=list(range(states.shape[0])))
    return e, labels[list(e.labels)]

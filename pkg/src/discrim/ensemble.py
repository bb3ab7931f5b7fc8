"""Ensembles of weighted density matrices.

An :class:`Ensemble` is immutable: priors and states are stored as read-only
arrays and every invariant is checked when it is built. Zero-weight entries
are dropped (their original positions are kept in ``labels``) and priors are
renormalized only when they already sum to one within ``1e-6``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _config
from .exceptions import DomainError, ValidationError
from .linalg import as_complex_matrix, hermitize, is_hermitian, spectral_decompose

__all__ = [
    "Ensemble",
    "EnsembleStats",
    "validate",
    "syndrome_expand",
    "coarse_grain_measurement",
    "random_pure_ensemble",
    "random_mixed_ensemble",
    "near_orthonormal_family",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _check_density(rho, index: int, dim: int | None) -> np.ndarray:
    try:
        arr = as_complex_matrix(rho)
    except DomainError as exc:
        raise ValidationError(f"state {index}: {exc}") from None
    if arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"state {index}: matrix is not square, shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValidationError(
            f"state {index}: dimension {arr.shape[0]} differs from ensemble dimension {dim}"
        )
    if not is_hermitian(arr):
        dev = float(np.max(np.abs(arr - arr.conj().T)))
        raise ValidationError(
            f"state {index}: not Hermitian (max deviation {dev:.3e} > "
            f"{_config.HERMITIAN_RTOL:g} x max-abs-entry)"
        )
    arr = hermitize(arr)
    tr = float(np.trace(arr).real)
    if abs(tr - 1.0) > _config.DENSITY_TRACE_TOL:
        raise ValidationError(
            f"state {index}: trace {tr!r} differs from 1 by {abs(tr - 1):.3e} "
            f"(tolerance {_config.DENSITY_TRACE_TOL:g})"
        )
    lmin = float(spectral_decompose(arr).eigenvalues[-1])
    if lmin < -_config.DENSITY_PSD_TOL:
        raise ValidationError(
            f"state {index}: min eigenvalue {lmin:.3e} below "
            f"-{_config.DENSITY_PSD_TOL:g} (not PSD)"
        )
    return arr


def _check_priors(priors) -> np.ndarray:
    p = np.asarray(priors, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValidationError(f"priors must be a non-empty 1-D sequence, got shape {p.shape}")
    for i, v in enumerate(p):
        if not np.isfinite(v):
            raise ValidationError(f"prior {i}: not finite ({v!r})")
        if v < 0:
            raise ValidationError(f"prior {i}: negative value {v!r}")
    total = float(p.sum())
    if abs(total - 1.0) > _config.PRIOR_RENORMALIZE_TOL:
        raise ValidationError(
            f"priors sum to {total!r}, not 1 (tolerance {_config.PRIOR_RENORMALIZE_TOL:g})"
        )
    return p


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Finite ensemble ``{(p_k, rho_k)}`` on a common Hilbert space.

    Parameters
    ----------
    priors : sequence of float
        Non-negative weights summing to one within ``1e-6``.
    states : sequence of (dim, dim) array_like
        Density matrices.
    labels : sequence of int, optional
        External labels for the states; defaults to ``0..m-1``. Entries with
        negligible prior are dropped together with their labels.
    """

    priors: np.ndarray
    states: tuple
    labels: tuple = None

    def __post_init__(self):
        p = _check_priors(self.priors)
        states = list(self.states)
        if len(states) != p.size:
            raise ValidationError(
                f"{p.size} priors given for {len(states)} states"
            )
        labels = tuple(range(p.size)) if self.labels is None else tuple(self.labels)
        if len(labels) != p.size:
            raise ValidationError(f"{len(labels)} labels given for {p.size} states")

        dim = None
        checked = []
        for i, rho in enumerate(states):
            arr = _check_density(rho, i, dim)
            dim = arr.shape[0]
            checked.append(arr)

        cut = _config.eigen_cutoff()
        keep = p > cut * p.max()
        p = p[keep] / p[keep].sum()
        checked = [r for r, k in zip(checked, keep) if k]
        labels = tuple(lab for lab, k in zip(labels, keep) if k)

        object.__setattr__(self, "priors", _readonly(p))
        object.__setattr__(self, "states", tuple(_readonly(r) for r in checked))
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_pure(cls, priors, vectors, labels=None) -> "Ensemble":
        """Build from state vectors (normalized here)."""
        states = []
        for i, v in enumerate(vectors):
            v = np.asarray(v, dtype=complex).ravel()
            n = np.linalg.norm(v)
            if not n > 0:
                raise ValidationError(f"state {i}: zero vector")
            v = v / n
            states.append(np.outer(v, v.conj()))
        return cls(priors, states, labels)

    @property
    def m(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    def __len__(self):
        return self.m

    def __iter__(self):
        return iter(zip(self.priors, self.states))

    def average_state(self) -> np.ndarray:
        return hermitize(sum(p * r for p, r in self))

    def stack(self) -> np.ndarray:
        """States as a ``(m, dim, dim)`` array."""
        return np.stack(self.states)


@dataclass(frozen=True)
class EnsembleStats:
    m: int
    dim: int
    span_rank: int
    is_pure: bool
    is_equiprobable: bool

    def to_dict(self):
        return {
            "m": self.m,
            "dim": self.dim,
            "span_rank": self.span_rank,
            "is_pure": self.is_pure,
            "is_equiprobable": self.is_equiprobable,
        }


def _rank(w: np.ndarray, cutoff: float) -> int:
    lmax = float(w.max(initial=0.0))
    if lmax <= 0:
        return 0
    return int(np.count_nonzero(w > cutoff * lmax))


def is_pure_ensemble(e: Ensemble, cutoff: float | None = None) -> bool:
    cut = _config.eigen_cutoff(cutoff)
    return all(_rank(spectral_decompose(r).eigenvalues, cut) == 1 for r in e.states)


def pure_vectors(e: Ensemble, cutoff: float | None = None) -> np.ndarray:
    """Columns ``psi_k`` with ``rho_k = |psi_k><psi_k|``; raises if not pure."""
    cut = _config.eigen_cutoff(cutoff)
    cols = []
    for k, r in enumerate(e.states):
        dec = spectral_decompose(r)
        if _rank(dec.eigenvalues, cut) != 1:
            raise DomainError(f"state {k} is not pure (rank > 1)")
        cols.append(dec.eigenvectors[:, 0])
    return np.column_stack(cols)


def validate(e: Ensemble) -> EnsembleStats:
    """Re-check every ensemble invariant and summarize the ensemble.

    Raises
    ------
    ValidationError
        Naming the offending index and the violated bound.
    """
    p = np.asarray(e.priors, dtype=float)
    if p.size != len(e.states) or p.size == 0:
        raise ValidationError(f"{p.size} priors for {len(e.states)} states")
    for i, v in enumerate(p):
        if not v > 0:
            raise ValidationError(f"prior {i}: {v!r} is not positive")
    total = float(p.sum())
    if abs(total - 1.0) > _config.PRIOR_SUM_TOL:
        raise ValidationError(
            f"priors sum to {total!r}, not 1 (tolerance {_config.PRIOR_SUM_TOL:g})"
        )
    dim = e.states[0].shape[0]
    for i, r in enumerate(e.states):
        _check_density(r, i, dim)

    cut = _config.eigen_cutoff()
    span_rank = _rank(spectral_decompose(e.average_state()).eigenvalues, cut)
    return EnsembleStats(
        m=p.size,
        dim=dim,
        span_rank=span_rank,
        is_pure=is_pure_ensemble(e),
        is_equiprobable=bool(np.all(np.abs(p - 1.0 / p.size) <= _config.PRIOR_SUM_TOL)),
    )


def syndrome_expand(e: Ensemble, cutoff: float | None = None):
    """Pure ensemble of weighted eigenvectors ``{(p_k mu_kl, |psi_kl>)}``.

    Eigenvalues ``mu_kl <= cutoff * max_l mu_kl`` are omitted.

    Returns
    -------
    expanded : Ensemble
    parent_of : tuple of int
        ``parent_of[j]`` is the index (into `e`) of the state syndrome ``j``
        came from.
    """
    cut = _config.eigen_cutoff(cutoff)
    weights, states, parent = [], [], []
    for k, (p, rho) in enumerate(e):
        dec = spectral_decompose(rho)
        mu = dec.eigenvalues
        for ell in np.flatnonzero(mu > cut * mu[0]):
            v = dec.eigenvectors[:, ell]
            weights.append(p * mu[ell])
            states.append(np.outer(v, v.conj()))
            parent.append(k)
    weights = np.asarray(weights)
    return Ensemble(weights / weights.sum(), states), tuple(parent)


def coarse_grain_measurement(expanded_povm, parent_of: Sequence[int], m: int | None = None):
    """Merge syndrome outcomes: effect ``k`` is the sum of effects with parent ``k``."""
    from .measurement import Povm

    parent_of = [int(j) for j in parent_of]
    if len(parent_of) != len(expanded_povm.effects):
        raise DomainError(
            f"parent map has {len(parent_of)} entries for "
            f"{len(expanded_povm.effects)} effects"
        )
    if m is None:
        m = max(parent_of) + 1
    for j, k in enumerate(parent_of):
        if not 0 <= k < m:
            raise DomainError(f"expanded outcome {j} has dangling parent index {k}")
    dim = expanded_povm.dim
    effects = [np.zeros((dim, dim), dtype=complex) for _ in range(m)]
    for eff, k in zip(expanded_povm.effects, parent_of):
        effects[k] = effects[k] + eff
    return Povm(effects, expanded_povm.residual)


def _gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _draw_priors(rng: np.random.Generator, m: int, mode: str) -> np.ndarray:
    if mode == "uniform":
        return np.full(m, 1.0 / m)
    if mode == "random":
        u = rng.uniform(size=m)
        return u / u.sum()
    raise DomainError(f"priors must be 'uniform' or 'random', got {mode!r}")


def random_pure_ensemble(dim: int, m: int, priors: str = "uniform", seed=None) -> Ensemble:
    """Haar-random pure states from normalized complex Gaussian vectors."""
    if dim < 1 or m < 1:
        raise DomainError(f"need dim >= 1 and m >= 1, got dim={dim}, m={m}")
    rng = np.random.default_rng(seed)
    p = _draw_priors(rng, m, priors)
    vecs = _gaussian(rng, (m, dim))
    return Ensemble.from_pure(p, vecs)


def random_mixed_ensemble(dim: int, m: int, rank: int, seed=None) -> Ensemble:
    """States ``G G^dagger / Tr(G G^dagger)`` with ``G`` a ``dim x rank`` Ginibre matrix."""
    if not 1 <= rank <= dim:
        raise DomainError(f"need 1 <= rank <= dim, got rank={rank}, dim={dim}")
    if m < 1:
        raise DomainError(f"need m >= 1, got {m}")
    rng = np.random.default_rng(seed)
    p = _draw_priors(rng, m, "random")
    states = []
    for _ in range(m):
        g = _gaussian(rng, (dim, rank))
        r = g @ g.conj().T
        states.append(hermitize(r / np.trace(r).real))
    return Ensemble(p, states)


def _max_overlap(vecs: np.ndarray) -> float:
    g = np.abs(vecs.conj() @ vecs.T)
    np.fill_diagonal(g, 0.0)
    return float(g.max(initial=0.0))


def near_orthonormal_family(m: int, epsilon: float, seed=None) -> Ensemble:
    """`m` pure states in ``C^m`` with pairwise overlaps at most `epsilon`.

    ``psi_k = (e_k + t g_k) / norm`` with seeded unit Gaussian directions
    ``g_k``; ``t`` starts at `epsilon` and is shrunk until the largest overlap
    is within bound. Priors depend on the seed only, so a fixed seed gives the
    same priors and perturbation directions for every `epsilon`.
    """
    if not 0 <= epsilon < 1:
        raise DomainError(f"epsilon must lie in [0, 1), got {epsilon!r}")
    if m < 1:
        raise DomainError(f"need m >= 1, got {m}")
    rng = np.random.default_rng(seed)
    p = _draw_priors(rng, m, "random")
    g = _gaussian(rng, (m, m))
    g /= np.linalg.norm(g, axis=1, keepdims=True)

    def family(t):
        v = np.eye(m, dtype=complex) + t * g
        return v / np.linalg.norm(v, axis=1, keepdims=True)

    t = float(epsilon)
    vecs = family(t)
    for _ in range(200):
        ov = _max_overlap(vecs)
        if ov <= epsilon:
            break
        t *= 0.999 * epsilon / ov
        vecs = family(t)
    else:
        raise DomainError(f"could not reach overlap bound {epsilon!r}")
    return Ensemble.from_pure(p, vecs)

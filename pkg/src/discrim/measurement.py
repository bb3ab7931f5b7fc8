"""POVMs and the square-root measurement family.

Weighted measurements resolve the identity only on the span of their weight
operator; the complement ``I - P_span`` is stored as an explicit
``residual`` (inconclusive) effect, so completeness is always checkable on
the full space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _config
from .ensemble import Ensemble, pure_vectors
from .exceptions import (
    DegenerateIterationError,
    DomainError,
    NumericError,
    ValidationError,
)
from .linalg import as_hermitian, hermitize, pinv_sqrt, psd_power, spectral_decompose, support_projector

__all__ = [
    "Povm",
    "MeasurementReport",
    "JrfTrace",
    "evaluate",
    "pgm",
    "hjrf_quadratic",
    "belavkin_weighted",
    "holevo_pure_basis",
    "holevo_vectors",
    "jrf_iterate",
    "jrf_converge",
]


def _frozen(a):
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Povm:
    """Labeled PSD effects plus an optional inconclusive residual.

    Effects must be PSD within ``1e-9`` and, together with the residual,
    sum to the identity within ``1e-8`` (spectral norm).
    """

    effects: tuple
    residual: np.ndarray | None = None

    def __post_init__(self):
        effects = [as_hermitian(e) for e in self.effects]
        if not effects:
            raise ValidationError("a POVM needs at least one effect")
        dim = effects[0].shape[0]
        for i, e in enumerate(effects):
            if e.shape != (dim, dim):
                raise ValidationError(f"effect {i}: shape {e.shape}, expected {(dim, dim)}")
            lmin = spectral_decompose(e).eigenvalues[-1]
            if lmin < -_config.POVM_PSD_TOL:
                raise ValidationError(
                    f"effect {i}: min eigenvalue {lmin:.3e} below -{_config.POVM_PSD_TOL:g}"
                )
        residual = None
        total = sum(effects)
        if self.residual is not None:
            residual = as_hermitian(self.residual)
            if residual.shape != (dim, dim):
                raise ValidationError(f"residual: shape {residual.shape}, expected {(dim, dim)}")
            lmin = spectral_decompose(residual).eigenvalues[-1]
            if lmin < -_config.POVM_PSD_TOL:
                raise ValidationError(
                    f"residual: min eigenvalue {lmin:.3e} below -{_config.POVM_PSD_TOL:g}"
                )
            total = total + residual
        dev = np.linalg.norm(total - np.eye(dim), 2)
        if dev > _config.POVM_COMPLETENESS_TOL:
            raise ValidationError(
                f"effects sum to identity only within {dev:.3e} "
                f"(tolerance {_config.POVM_COMPLETENESS_TOL:g})"
            )
        object.__setattr__(self, "effects", tuple(_frozen(e) for e in effects))
        object.__setattr__(self, "residual", None if residual is None else _frozen(residual))

    @classmethod
    def uniform(cls, dim: int, m: int) -> "Povm":
        return cls([np.eye(dim) / m] * m)

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    def __len__(self):
        return len(self.effects)

    def stack(self) -> np.ndarray:
        return np.stack(self.effects)

    def effect_roots(self):
        """Canonical PSD factors ``E_k = M_k^{1/2}``."""
        return [psd_power(e, 0.5, psd_tol=_config.POVM_PSD_TOL) for e in self.effects]


def _build(effects, residual=None) -> Povm:
    # constructions are correct by design; an invariant failure here is numeric
    try:
        return Povm(effects, residual)
    except (ValidationError, DomainError) as exc:
        raise NumericError(f"constructed measurement is not a valid POVM: {exc}") from exc


def _residual_from_support(proj: np.ndarray):
    dim = proj.shape[0]
    rest = hermitize(np.eye(dim) - proj)
    if np.linalg.norm(rest, 2) < 0.5:
        return None
    return rest


@dataclass(frozen=True)
class MeasurementReport:
    """Outcome statistics of a POVM on an ensemble.

    ``per_outcome[i, j]`` is ``Tr(M_i rho_j)``.
    """

    success: float
    failure: float
    per_outcome: np.ndarray
    inconclusive_mass: float

    def to_dict(self):
        return {
            "success": self.success,
            "failure": self.failure,
            "inconclusive_mass": self.inconclusive_mass,
            "per_outcome": self.per_outcome.tolist(),
        }


@dataclass(frozen=True)
class JrfTrace:
    iterates: list
    success_history: list
    converged: bool
    iterations: int

    @property
    def final(self) -> Povm:
        return self.iterates[-1]


def _check_pair(e: Ensemble, povm: Povm):
    if povm.dim != e.dim:
        raise DomainError(f"POVM dimension {povm.dim} differs from ensemble dimension {e.dim}")
    if len(povm) != e.m:
        raise DomainError(f"POVM has {len(povm)} effects for an ensemble of {e.m} states")


def evaluate(e: Ensemble, povm: Povm) -> MeasurementReport:
    """Success and failure rates of `povm` on `e`."""
    _check_pair(e, povm)
    rhos = e.stack()
    cond = np.einsum("iab,jba->ij", povm.stack(), rhos).real
    success = float(np.dot(e.priors, np.diag(cond)))
    if povm.residual is None:
        inconclusive = 0.0
    else:
        inconclusive = float(
            np.dot(e.priors, np.einsum("ab,jba->j", povm.residual, rhos).real)
        )
    return MeasurementReport(success, 1.0 - success, cond, inconclusive)


def _square_root_measurement(weights, cutoff=None) -> Povm:
    if len(weights) == 1:
        proj = support_projector(weights[0], cutoff)
        return _build([proj], _residual_from_support(proj))
    total = hermitize(sum(weights))
    s, proj = pinv_sqrt(total, cutoff, return_support=True)
    effects = [hermitize(s @ a @ s) for a in weights]
    return _build(effects, _residual_from_support(proj))


def belavkin_weighted(e: Ensemble, s: float, cutoff: float | None = None) -> Povm:
    """Power-weighted square-root measurement with weights ``(p_k rho_k)^s``.

    ``M_k = T^{-1/2+} p_k^s rho_k^s T^{-1/2+}`` with ``T = sum_l p_l^s rho_l^s``.
    ``s = 1`` is the pretty good measurement, ``s = 2`` the quadratic one.
    """
    if not s >= 1:
        raise DomainError(f"weighting power must be >= 1, got {s!r}")
    weights = [p**s * psd_power(r, s) for p, r in e]
    return _square_root_measurement(weights, cutoff)


def pgm(e: Ensemble, cutoff: float | None = None) -> Povm:
    return belavkin_weighted(e, 1.0, cutoff)


def hjrf_quadratic(e: Ensemble, cutoff: float | None = None) -> Povm:
    """Quadratically weighted measurement (first JRF iterate).

    Minimizes the approximate cost ``sum_k p_k (1 - ||E_k rho_k||_1)`` over
    POVMs on the span; the minimum value is ``capital_gamma(e)``.
    """
    weights = [p * p * hermitize(r @ r) for p, r in e]
    return _square_root_measurement(weights, cutoff)


def holevo_vectors(e: Ensemble, cutoff: float | None = None) -> np.ndarray:
    """Columns ``e_k = (sum_l p_l^2 |psi_l><psi_l|)^{-1/2+} p_k |psi_k>``."""
    psi = pure_vectors(e, cutoff)
    g = hermitize((psi * e.priors**2) @ psi.conj().T)
    return pinv_sqrt(g, cutoff) @ (psi * e.priors)


def holevo_pure_basis(e: Ensemble, cutoff: float | None = None) -> Povm:
    """Holevo's measurement ``|e_k><e_k|`` for a pure-state ensemble."""
    vecs = holevo_vectors(e, cutoff)
    effects = [np.outer(v, v.conj()) for v in vecs.T]
    proj = hermitize(sum(effects))
    # rank-1 effects sum to the support projector of the weighted Gram operator
    return _build(effects, _residual_from_support(support_projector(proj, cutoff)))


def _effects_of(prev) -> list:
    if isinstance(prev, Povm):
        return list(prev.effects)
    return [as_hermitian(m) for m in prev]


def jrf_iterate(e: Ensemble, prev, cutoff: float | None = None) -> Povm:
    """One Jezek-Rehacek-Fiurasek update.

    ``M_k <- T^{-1/2+} p_k^2 rho_k M_k rho_k T^{-1/2+}`` with
    ``T = sum_l p_l^2 rho_l M_l rho_l``. `prev` may be a :class:`Povm` or any
    sequence of PSD effects; the update is invariant under rescaling them.
    """
    effects = _effects_of(prev)
    if len(effects) != e.m:
        raise DomainError(f"{len(effects)} effects given for an ensemble of {e.m} states")
    for i, m in enumerate(effects):
        if m.shape != (e.dim, e.dim):
            raise DomainError(f"effect {i}: shape {m.shape}, expected {(e.dim, e.dim)}")
        lmin = spectral_decompose(m).eigenvalues[-1]
        if lmin < -_config.POVM_PSD_TOL * max(1.0, np.abs(m).max()):
            raise DomainError(f"effect {i} is not PSD (min eigenvalue {lmin:.3e})")
    weights = [p * p * hermitize(r @ m @ r) for (p, r), m in zip(e, effects)]
    total = hermitize(sum(weights))
    scale = sum(p * p * np.linalg.norm(m, 2) for p, m in zip(e.priors, effects))
    lmax = spectral_decompose(total).eigenvalues[0]
    if not lmax > np.finfo(float).eps * scale or not np.isfinite(lmax):
        raise DegenerateIterationError(
            "JRF normalizer sum_l p_l^2 rho_l M_l rho_l is numerically zero"
        )
    return _square_root_measurement(weights, cutoff)


def jrf_converge(
    e: Ensemble,
    tol: float = 1e-10,
    max_iter: int = 500,
    start: Povm | None = None,
    cutoff: float | None = None,
) -> JrfTrace:
    """Iterate :func:`jrf_iterate` from ``I/m`` (or `start`).

    Stops once consecutive success rates differ by less than `tol`, or after
    `max_iter` updates. The whole trace is returned; convergence is reported,
    never assumed.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    if max_iter < 0:
        raise DomainError(f"max_iter must be >= 0, got {max_iter!r}")
    current = Povm.uniform(e.dim, e.m) if start is None else start
    iterates = [current]
    history = [evaluate(e, current).success]
    converged = False
    for _ in range(max_iter):
        current = jrf_iterate(e, current, cutoff)
        iterates.append(current)
        history.append(evaluate(e, current).success)
        if abs(history[-1] - history[-2]) < tol:
            converged = True
            break
    return JrfTrace(iterates, history, converged, len(history) - 1)

"""Independent ground truth for the optimal failure rate.

Two routes:

* :func:`helstrom_two_state` is exact for two states.
* :func:`certify` encloses ``P_fail^opt`` for any ensemble: the converged JRF
  measurement gives an achievable failure rate (upper end) and a shifted
  dual operator ``Y + shift I >= p_k rho_k`` gives, by weak duality, an
  upper bound ``Tr Y'`` on the optimal success rate (lower end).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import Ensemble
from .exceptions import DomainError
from .linalg import hermitize, spectral_decompose, trace_norm
from .measurement import Povm, evaluate, jrf_converge

__all__ = [
    "CertifiedInterval",
    "helstrom_two_state",
    "ykl_residual",
    "dual_upper_on_success",
    "certify",
    "syndrome_corollary_check",
]


@dataclass(frozen=True)
class CertifiedInterval:
    """``lower <= P_fail^opt <= upper``; `upper` is attained by `witness`."""

    lower: float
    upper: float
    witness: Povm
    dual_shift: float
    iterations: int = 0
    converged: bool = False
    ykl_residual: float = 0.0

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= x <= self.upper + tol

    def to_dict(self):
        return {
            "lower": self.lower,
            "upper": self.upper,
            "width": self.width,
            "dual_shift": self.dual_shift,
            "ykl_residual": self.ykl_residual,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def helstrom_two_state(e: Ensemble) -> float:
    """``(1 - ||p_1 rho_1 - p_2 rho_2||_1) / 2``."""
    if e.m != 2:
        raise DomainError(f"Helstrom oracle needs exactly two states, got {e.m}")
    (p1, r1), (p2, r2) = e
    return 0.5 * (1.0 - trace_norm(p1 * r1 - p2 * r2))


def _dual_operator(e: Ensemble, povm: Povm) -> np.ndarray:
    if povm.dim != e.dim or len(povm) != e.m:
        raise DomainError("POVM does not match the ensemble")
    y = sum(p * (r @ m) for (p, r), m in zip(e, povm.effects))
    return hermitize(y)


def _residual(e: Ensemble, y: np.ndarray) -> float:
    return max(float(spectral_decompose(hermitize(p * r - y)).eigenvalues[0]) for p, r in e)


def ykl_residual(e: Ensemble, povm: Povm) -> float:
    """``max_j lambda_max(p_j rho_j - Y)`` with ``Y = Herm(sum_k p_k rho_k M_k)``.

    Non-positive exactly when ``Y`` is dual feasible, i.e. when `povm` meets
    the Yuen-Kennedy-Lax optimality conditions.
    """
    return _residual(e, _dual_operator(e, povm))


def _dual_bound(e: Ensemble, povm: Povm):
    y = _dual_operator(e, povm)
    res = _residual(e, y)
    shift = max(0.0, res)
    return min(1.0, float(np.trace(y).real) + shift * e.dim), shift, res


def dual_upper_on_success(e: Ensemble, povm: Povm) -> float:
    """Weak-duality upper bound ``min(1, Tr Y')`` on the optimal success rate."""
    return _dual_bound(e, povm)[0]


def certify(e: Ensemble, tol: float = 1e-10, max_iter: int = 500) -> CertifiedInterval:
    """Certified enclosure of the optimal failure rate.

    The witness is the last JRF iterate; at least one update is always made,
    so ``max_iter=0`` certifies with the quadratic (first-iterate) measurement.
    """
    trace = jrf_converge(e, tol=tol, max_iter=max(1, int(max_iter)))
    witness = trace.final
    upper = evaluate(e, witness).failure
    dual, shift, res = _dual_bound(e, witness)
    lower = 1.0 - dual
    upper = min(1.0, max(0.0, upper))
    lower = min(1.0, max(0.0, lower))
    return CertifiedInterval(
        lower=lower,
        upper=upper,
        witness=witness,
        dual_shift=shift,
        iterations=trace.iterations,
        converged=trace.converged,
        ykl_residual=res,
    )


def syndrome_corollary_check(cert: CertifiedInterval, cert_star: CertifiedInterval, tol: float = 1e-9) -> dict:
    """Feasibility of ``x <= y <= (2 - x) x`` with ``x`` in `cert`, ``y`` in `cert_star`.

    ``x`` and ``y`` stand for the optimal failure rates of an ensemble and of
    its syndrome ensemble. Both end constraints increase with ``x``, so
    ``x = min(cert.upper, cert_star.upper)`` is the best choice to test.
    """
    a, b = cert.lower, cert.upper
    c, d = cert_star.lower, cert_star.upper
    x = min(b, d)
    y = max(c, x)
    lower_ok = a <= x + tol
    upper_ok = c <= (2.0 - x) * x + tol
    return {
        "feasible": bool(lower_ok and upper_ok),
        "lower_inequality_feasible": bool(lower_ok),
        "upper_inequality_feasible": bool(upper_ok),
        "x": x,
        "y": y,
        "upper_bound_at_x": (2.0 - x) * x,
    }

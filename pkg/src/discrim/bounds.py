"""Analytic two-sided bounds on the optimal failure rate.

The central quantity is ``Gamma = 1 - Tr sqrt(sum_k p_k^2 rho_k^2)``, which
satisfies

    Gamma <= P_fail^opt <= P_fail^HJRF <= Gamma (2 - Gamma) <= 2 Gamma.

All bounds are computed on the span of the ensemble. Gamma itself does not
depend on the eigenvalue cutoff because the square root vanishes at zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import _config
from .ensemble import Ensemble, is_pure_ensemble, pure_vectors
from .exceptions import BoundViolationError, DomainError
from .linalg import as_complex_matrix, hermitize, operator_norm, pinv_sqrt, spectral_decompose, trace_norm
from .measurement import Povm, evaluate, hjrf_quadratic, pgm

__all__ = [
    "Interval",
    "BoundReport",
    "DEFAULT_S_LIST",
    "capital_gamma",
    "gamma_holevo_pure",
    "approximate_cost",
    "curlander_interval",
    "two_sided_interval",
    "barnum_knill_bound",
    "s_power_lower_bound",
    "pgm_pure_upper_bound",
    "contraction_interval_check",
    "lemma4_check",
    "bound_report",
]

DEFAULT_S_LIST = (1.0, 1.5, 2.0, 3.0, 4.0)


class Interval(NamedTuple):
    lower: float
    upper: float

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= x <= self.upper + tol

    def scaled(self, c: float) -> "Interval":
        """``[a, b] x c`` for ``c >= 0``."""
        return Interval(self.lower * c, self.upper * c)


def capital_gamma(e: Ensemble) -> float:
    """``1 - Tr sqrt(sum_k p_k^2 rho_k^2)``, in ``[0, 1)``.

    Evaluated as ``1 - ||V||_1`` for the stacked operator
    ``V = [p_1 rho_1; ...; p_m rho_m]`` (``V^dagger V = sum_k p_k^2 rho_k^2``).
    Singular values of ``V`` carry absolute error ``~eps ||V||``, whereas
    square roots of ``eigh`` eigenvalues would turn round-off at zero into
    ``~sqrt(eps)`` errors.
    """
    v = np.vstack([p * r for p, r in e])
    return 1.0 - trace_norm(v)


def gamma_holevo_pure(e: Ensemble) -> float:
    """Pure-state Gamma, ``1 - Tr sqrt(sum_k p_k^2 |psi_k><psi_k|)``.

    Computed from the ``dim x m`` matrix of weighted kets ``[p_k psi_k]``
    whose singular values are the square roots of the operator's spectrum.
    """
    psi = pure_vectors(e)
    return 1.0 - trace_norm(psi * e.priors)


def approximate_cost(e: Ensemble, povm: Povm) -> float:
    """``C = sum_k p_k (1 - ||E_k rho_k||_1)`` with ``E_k = M_k^{1/2}``."""
    if povm.dim != e.dim or len(povm) != e.m:
        raise DomainError(
            f"POVM ({len(povm)} effects on C^{povm.dim}) does not match "
            f"ensemble ({e.m} states on C^{e.dim})"
        )
    roots = povm.effect_roots()
    return float(sum(p * (1.0 - trace_norm(ek @ r)) for (p, r), ek in zip(e, roots)))


def two_sided_interval(e: Ensemble) -> Interval:
    g = capital_gamma(e)
    return Interval(g, 2.0 * g)


def curlander_interval(e: Ensemble) -> Interval:
    """``[Gamma, Gamma (2 - Gamma)]``; contains both the optimal and HJRF failure."""
    g = capital_gamma(e)
    return Interval(g, g * (2.0 - g))


def barnum_knill_bound(e: Ensemble | None, p_fail_opt: float) -> float:
    """``(1 + P_succ^opt) P_fail^opt``, an upper bound on the HJRF failure rate.

    `e` is accepted for interface symmetry and not used.
    """
    if not 0.0 <= p_fail_opt <= 1.0:
        raise DomainError(f"optimal failure rate must lie in [0, 1], got {p_fail_opt!r}")
    return (2.0 - p_fail_opt) * p_fail_opt


def s_power_lower_bound(e: Ensemble, s: float) -> float:
    """``1 - Tr[(sum_k p_k^s rho_k^s)^{1/s}]``, a lower bound for every ``s >= 1``."""
    if not s >= 1:
        raise DomainError(f"s must be >= 1, got {s!r}")
    # sum_k p_k^s rho_k^s = B B^dagger with columns p_k^{s/2} mu^{s/2} |psi>
    cols = []
    for p, r in e:
        dec = spectral_decompose(r)
        mu = np.clip(dec.eigenvalues, 0.0, None)
        cols.append(dec.eigenvectors * (p * mu) ** (s / 2))
    sv = np.linalg.svd(np.hstack(cols), compute_uv=False)
    return 1.0 - float(np.sum(sv ** (2.0 / s)))


def pgm_pure_upper_bound(e: Ensemble) -> float:
    """Upper bound on the PGM failure rate for pure states.

    With ``t = Tr(A^{-1/2} sum_l p_l^{3/2} |psi_l><psi_l|)`` and
    ``A = sum_l p_l |psi_l><psi_l|``, Jensen's inequality gives
    ``P_succ^PGM >= t^2``; the bound returned is ``1 - t^2``.
    """
    psi = pure_vectors(e)
    a = hermitize((psi * e.priors) @ psi.conj().T)
    b = hermitize((psi * e.priors**1.5) @ psi.conj().T)
    t = float(np.trace(pinv_sqrt(a) @ b).real)
    return 1.0 - t * t


def contraction_interval_check(E, rho) -> tuple[float, Interval]:
    """Evaluate ``1 - Tr(E^dagger E rho)`` and ``[1, 2] x (1 - ||E rho||_1)``.

    Requires ``||E|| <= 1``; the first value lies in the interval.
    """
    E = as_complex_matrix(E)
    rho = as_complex_matrix(rho)
    if E.shape[1] != rho.shape[0] or rho.shape[0] != rho.shape[1]:
        raise DomainError(f"shape mismatch: E {E.shape}, rho {rho.shape}")
    nrm = operator_norm(E)
    if nrm > 1.0 + 1e-10:
        raise DomainError(f"E must be a contraction, operator norm is {nrm!r}")
    lhs = 1.0 - float(np.trace(E.conj().T @ E @ rho).real)
    base = 1.0 - trace_norm(E @ rho)
    return lhs, Interval(base, 2.0 * base)


lemma4_check = contraction_interval_check


@dataclass(frozen=True)
class BoundReport:
    gamma: float
    two_sided: Interval
    curlander: Interval
    hjrf_failure: float
    pgm_failure: float
    s_power: list
    cost_C_hjrf: float
    pure_gamma_holevo: float | None = None
    pgm_pure_upper: float | None = None
    checks: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "gamma": self.gamma,
            "two_sided": list(self.two_sided),
            "curlander": list(self.curlander),
            "hjrf_failure": self.hjrf_failure,
            "pgm_failure": self.pgm_failure,
            "s_power": [{"s": s, "lower_bound": v} for s, v in self.s_power],
            "cost_C_hjrf": self.cost_C_hjrf,
            "pure_gamma_holevo": self.pure_gamma_holevo,
            "pgm_pure_upper": self.pgm_pure_upper,
            "checks": dict(self.checks),
        }


def _require(checks: dict, name: str, ok: bool, detail: str):
    checks[name] = bool(ok)
    if not ok:
        raise BoundViolationError(f"inequality chain violated: {name} ({detail})")


def bound_report(
    e: Ensemble,
    s_list: Sequence[float] = DEFAULT_S_LIST,
    tol: float = _config.CHAIN_TOL,
) -> BoundReport:
    """Compute every bound for `e` and verify the inequality chains.

    Raises :class:`BoundViolationError` instead of returning inconsistent
    numbers.
    """
    g = capital_gamma(e)
    hjrf = hjrf_quadratic(e)
    hjrf_fail = evaluate(e, hjrf).failure
    pgm_fail = evaluate(e, pgm(e)).failure
    cost = approximate_cost(e, hjrf)
    s_power = [(float(s), s_power_lower_bound(e, s)) for s in s_list]
    pure = is_pure_ensemble(e)
    gh = gamma_holevo_pure(e) if pure else None
    pgm_up = pgm_pure_upper_bound(e) if pure else None

    checks: dict = {}
    cur_hi = g * (2.0 - g)
    _require(checks, "0 <= gamma < 1", -tol <= g < 1.0, f"gamma={g!r}")
    _require(checks, "gamma <= hjrf_failure", g <= hjrf_fail + tol, f"{g!r} > {hjrf_fail!r}")
    _require(
        checks, "hjrf_failure <= gamma(2-gamma)", hjrf_fail <= cur_hi + tol,
        f"{hjrf_fail!r} > {cur_hi!r}",
    )
    _require(checks, "gamma(2-gamma) <= 2 gamma", cur_hi <= 2 * g + tol, f"{cur_hi!r} > {2 * g!r}")
    _require(checks, "cost(hjrf) == gamma", abs(cost - g) <= tol, f"|{cost!r} - {g!r}|")
    _require(
        checks, "cost <= failure <= 2 cost (hjrf)",
        cost - tol <= hjrf_fail <= 2 * cost + tol, f"cost={cost!r}, failure={hjrf_fail!r}",
    )
    for s, v in s_power:
        _require(
            checks, f"s_power(s={s:g}) <= hjrf_failure", v <= hjrf_fail + tol,
            f"{v!r} > {hjrf_fail!r}",
        )
    if pure:
        _require(checks, "gamma_holevo == gamma", abs(gh - g) <= tol, f"|{gh!r} - {g!r}|")
        _require(
            checks, "pgm_failure <= pgm_pure_upper", pgm_fail <= pgm_up + tol,
            f"{pgm_fail!r} > {pgm_up!r}",
        )
    return BoundReport(
        gamma=g,
        two_sided=Interval(g, 2.0 * g),
        curlander=Interval(g, cur_hi),
        hjrf_failure=hjrf_fail,
        pgm_failure=pgm_fail,
        s_power=s_power,
        cost_C_hjrf=cost,
        pure_gamma_holevo=gh,
        pgm_pure_upper=pgm_up,
        checks=checks,
    )

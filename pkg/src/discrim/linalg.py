"""Dense Hermitian spectral toolkit.

Every matrix function in the package goes through :func:`spectral_decompose`
so results computed within one run share the same eigensolver and ordering.
Matrices are plain ``numpy`` arrays; Hermitian inputs are checked, outputs
are re-symmetrized before they are returned.
"""

from __future__ import annotations

from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import _config
from .exceptions import DomainError, NotPSDError, NumericError

__all__ = [
    "SpectralDecomposition",
    "as_complex_matrix",
    "as_hermitian",
    "hermitize",
    "is_hermitian",
    "spectral_decompose",
    "apply_function",
    "psd_power",
    "psd_sqrt",
    "pinv_sqrt",
    "support_projector",
    "operator_norm",
    "trace_norm",
    "closest_isometry",
    "orthonormal_completion",
    "noise_floor",
    "trace_jensen_check",
]


class SpectralDecomposition(NamedTuple):
    """Eigenvalues (descending) and unitary eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self, values=None):
        v = self.eigenvectors
        w = self.eigenvalues if values is None else values
        return hermitize((v * w) @ v.conj().T)


def as_complex_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise DomainError(f"expected a 2-D matrix, got array of shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("matrix has non-finite entries")
    return arr


def hermitize(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def is_hermitian(a, rtol: float = _config.HERMITIAN_RTOL) -> bool:
    arr = np.asarray(a)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        return False
    scale = np.max(np.abs(arr)) if arr.size else 0.0
    return bool(np.max(np.abs(arr - arr.conj().T), initial=0.0) <= rtol * scale)


def as_hermitian(a, rtol: float = _config.HERMITIAN_RTOL) -> np.ndarray:
    """Validate Hermiticity and return the symmetrized complex copy."""
    arr = as_complex_matrix(a)
    if arr.shape[0] != arr.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {arr.shape}")
    if not is_hermitian(arr, rtol):
        dev = np.max(np.abs(arr - arr.conj().T))
        raise DomainError(
            f"matrix is not Hermitian: max |a_ij - conj(a_ji)| = {dev:.3e} "
            f"exceeds {rtol:g} x max-abs-entry"
        )
    return hermitize(arr)


def _canonical_phases(v: np.ndarray) -> np.ndarray:
    # first component with non-negligible modulus is made real-positive
    out = v.copy()
    for j in range(v.shape[1]):
        col = out[:, j]
        idx = np.flatnonzero(np.abs(col) > 1e-10)
        if idx.size:
            z = col[idx[0]]
            out[:, j] = col * (abs(z) / z)
    return out


def spectral_decompose(a) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Eigenvector phases are fixed so that the first non-negligible component is
    real and positive. Within a degenerate eigenspace the basis is whatever
    LAPACK returns; every result exposed by this package is independent of it.

    Raises
    ------
    DomainError
        If `a` is not Hermitian within tolerance.
    NumericError
        If the eigensolver fails to converge.
    """
    h = as_hermitian(a)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"Hermitian eigensolver failed: {exc}") from exc
    w = w[::-1].copy()
    v = _canonical_phases(v[:, ::-1])
    return SpectralDecomposition(w, v)


def noise_floor(w: np.ndarray) -> float:
    """Eigenvalues below this are indistinguishable from zero for ``eigh``."""
    return 16 * w.size * np.finfo(float).eps * float(np.max(np.abs(w), initial=0.0))


def _clip_psd(w: np.ndarray, tol: float) -> np.ndarray:
    scale = max(float(np.max(np.abs(w), initial=0.0)), 1.0)
    if w.size and w.min() < -tol * scale:
        raise NotPSDError(
            f"matrix is not positive semidefinite: min eigenvalue {w.min():.3e} "
            f"below -{tol:g}"
        )
    out = np.clip(w, 0.0, None)
    out[out <= noise_floor(w)] = 0.0
    return out


def apply_function(
    a,
    f: Callable[[np.ndarray], np.ndarray],
    *,
    nonnegative: bool = False,
    psd_tol: float = _config.DENSITY_PSD_TOL,
) -> np.ndarray:
    """Functional calculus ``f(a) = V diag(f(lambda)) V^dagger``.

    `f` receives the real eigenvalue array and must be vectorized. With
    ``nonnegative=True`` the spectrum is clipped at zero first (eigenvalues
    under the eigensolver noise floor count as exact zeros), and any
    eigenvalue below ``-psd_tol`` (relative to ``max(1, |lambda|_max)``)
    raises :class:`NotPSDError`; use this for ``sqrt`` and fractional powers.
    """
    dec = spectral_decompose(a)
    w = dec.eigenvalues
    if nonnegative:
        w = _clip_psd(w, psd_tol)
    with np.errstate(invalid="ignore", divide="ignore"):
        fw = np.asarray(f(w), dtype=float)
    if fw.shape != w.shape:
        raise DomainError("function must map the eigenvalue array elementwise")
    if not np.all(np.isfinite(fw)):
        bad = w[~np.isfinite(fw)]
        raise DomainError(f"function undefined at eigenvalue(s) {bad.tolist()}")
    return dec.reconstruct(fw)


def psd_sqrt(a, psd_tol: float = _config.DENSITY_PSD_TOL) -> np.ndarray:
    return apply_function(a, np.sqrt, nonnegative=True, psd_tol=psd_tol)


def psd_power(a, t: float, psd_tol: float = _config.DENSITY_PSD_TOL) -> np.ndarray:
    """``a**t`` for PSD `a` and ``t > 0`` (zero eigenvalues stay zero)."""
    if not t > 0:
        raise DomainError(f"power must be positive, got {t!r}")
    if t == 1:
        return as_hermitian(a)
    return apply_function(a, lambda w: w**t, nonnegative=True, psd_tol=psd_tol)


def _support_mask(w: np.ndarray, cutoff: float) -> np.ndarray:
    lmax = float(w.max(initial=0.0))
    if lmax <= 0.0:
        return np.zeros(w.shape, dtype=bool)
    if w.min() < -cutoff * lmax:
        raise NotPSDError(
            f"matrix is not positive semidefinite: eigenvalue {w.min():.3e} "
            f"< -cutoff * lambda_max = {-cutoff * lmax:.3e}"
        )
    return w > cutoff * lmax


def pinv_sqrt(a, cutoff: float | None = None, *, return_support: bool = False):
    """Pseudo-inverse square root on the support of a PSD matrix.

    Eigenvalues at or below ``cutoff * lambda_max`` are treated as zero and
    map to zero. ``cutoff`` defaults to the shared relative cutoff.

    Parameters
    ----------
    a : array_like
        Hermitian PSD matrix.
    cutoff : float, optional
        Relative eigenvalue threshold.
    return_support : bool
        Also return the projector onto the retained support, built from the
        same decomposition (so ``S a S`` and the projector agree to round-off).

    Returns
    -------
    ndarray or (ndarray, ndarray)
    """
    cut = _config.eigen_cutoff(cutoff)
    dec = spectral_decompose(a)
    keep = _support_mask(dec.eigenvalues, cut)
    inv = np.zeros_like(dec.eigenvalues)
    inv[keep] = dec.eigenvalues[keep] ** -0.5
    s = dec.reconstruct(inv)
    if return_support:
        return s, dec.reconstruct(keep.astype(float))
    return s


def support_projector(a, cutoff: float | None = None) -> np.ndarray:
    cut = _config.eigen_cutoff(cutoff)
    dec = spectral_decompose(a)
    return dec.reconstruct(_support_mask(dec.eigenvalues, cut).astype(float))


def numerical_rank(a, cutoff: float | None = None) -> int:
    cut = _config.eigen_cutoff(cutoff)
    w = spectral_decompose(a).eigenvalues
    return int(np.count_nonzero(_support_mask(w, cut)))


def operator_norm(a) -> float:
    arr = as_complex_matrix(a)
    if arr.size == 0:
        return 0.0
    return float(np.linalg.svd(arr, compute_uv=False)[0])


def trace_norm(a) -> float:
    """Sum of singular values."""
    arr = as_complex_matrix(a)
    if arr.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(arr, compute_uv=False)))


def orthonormal_completion(basis: np.ndarray, dim: int, count: int) -> np.ndarray:
    """Extend orthonormal columns `basis` by `count` vectors of ``C^dim``.

    Canonical basis vectors are Gram-Schmidt orthogonalized against the
    current set in index order; the first `count` that survive are returned.
    """
    q = np.asarray(basis, dtype=complex).reshape(dim, -1)
    found = []
    for i in range(dim):
        if len(found) == count:
            break
        cur = np.hstack([q] + [f[:, None] for f in found]) if found else q
        e = np.zeros(dim, dtype=complex)
        e[i] = 1.0
        # two passes of classical Gram-Schmidt
        for _ in range(2):
            e = e - cur @ (cur.conj().T @ e)
        n = np.linalg.norm(e)
        if n > 1e-3:
            found.append(e / n)
    if len(found) < count:
        raise NumericError("orthonormal completion failed")
    if not found:
        return np.zeros((dim, 0), dtype=complex)
    return np.column_stack(found)


def closest_isometry(a, cutoff: float | None = None) -> np.ndarray:
    """Isometry ``U`` maximizing ``Re Tr(a^dagger U)``.

    On the support of ``a^dagger a`` this is ``a (a^dagger a)^{-1/2+}``; off
    the support the kernel of `a` is mapped onto the orthogonal complement of
    the range of `a`, both bases obtained by :func:`orthonormal_completion`.
    `a` is ``dim K x dim H`` with ``dim K >= dim H``.
    """
    arr = as_complex_matrix(a)
    rows, cols = arr.shape
    if rows < cols:
        raise DomainError(
            f"isometry needs dim K >= dim H, got a {rows}x{cols} operator"
        )
    cut = _config.eigen_cutoff(cutoff)
    w_left, s, vh = np.linalg.svd(arr, full_matrices=False)
    keep = s**2 > cut * (s[0] ** 2 if s.size else 0.0)
    r = int(np.count_nonzero(keep))
    wl = w_left[:, :r]
    vr = vh[:r].conj().T
    u = wl @ vr.conj().T
    if r < cols:
        kernel = orthonormal_completion(vr, cols, cols - r)
        image = orthonormal_completion(wl, rows, cols - r)
        u = u + image @ kernel.conj().T
    return u


def _check_psd_summand(a, index: int, tol: float) -> np.ndarray:
    h = as_hermitian(a)
    w = spectral_decompose(h).eigenvalues
    scale = max(float(np.max(np.abs(w), initial=0.0)), 1.0)
    if w.size and w.min() < -tol * scale:
        raise NotPSDError(
            f"summand {index} is not PSD: min eigenvalue {w.min():.3e}"
        )
    return h


def trace_jensen_check(
    f: Callable[[np.ndarray], np.ndarray],
    summands: Sequence,
    psd_tol: float = _config.DENSITY_PSD_TOL,
) -> tuple[float, float]:
    """Return ``(Tr f(sum A_k), sum Tr f(A_k))``.

    For concave `f` on ``[0, inf)`` with ``f(0) = 0`` the first value never
    exceeds the second. Concavity is the caller's responsibility; ``f(0)``
    is checked.
    """
    if not summands:
        raise DomainError("need at least one summand")
    f0 = float(np.asarray(f(np.zeros(1)))[0])
    if abs(f0) > 1e-12:
        raise DomainError(f"f(0) must be 0, got {f0!r}")
    mats = [_check_psd_summand(a, i, psd_tol) for i, a in enumerate(summands)]
    dims = {m.shape for m in mats}
    if len(dims) != 1:
        raise DomainError(f"summands have mismatched shapes {sorted(dims)}")

    def tr_f(m):
        w = _clip_psd(spectral_decompose(m).eigenvalues, psd_tol)
        return float(np.sum(f(w)))

    lhs = tr_f(hermitize(sum(mats)))
    rhs = float(sum(tr_f(m) for m in mats))
    return lhs, rhs

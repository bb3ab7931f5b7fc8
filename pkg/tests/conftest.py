import numpy as np
import pytest

from discrim import Ensemble

_ACCEPTANCE_LINES = []


def two_pure(c, priors=(0.5, 0.5)):
    """Two pure qubit states with real overlap ``c``."""
    v1 = np.array([1.0, 0.0])
    v2 = np.array([c, np.sqrt(1.0 - c * c)])
    return Ensemble.from_pure(list(priors), [v1, v2])


def basis_ensemble(dim, priors=None):
    priors = np.full(dim, 1.0 / dim) if priors is None else np.asarray(priors)
    return Ensemble.from_pure(priors, np.eye(dim))


def random_psd(rng, dim, rank=None):
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    return g @ g.conj().T


def random_density(rng, dim, rank=None):
    a = random_psd(rng, dim, rank)
    return a / np.trace(a).real


def random_unitary(rng, dim):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_povm_effects(rng, dim, m):
    """Random complete POVM: ``S^{-1/2} A_k S^{-1/2}`` for random PSD ``A_k``."""
    while True:
        a = [random_psd(rng, dim, int(rng.integers(1, dim + 1))) for _ in range(m)]
        w, v = np.linalg.eigh(sum(a))
        if w[0] > 1e-6 * w[-1]:
            break
    s = (v * w**-0.5) @ v.conj().T
    out = [s @ x @ s for x in a]
    return [(x + x.conj().T) / 2 for x in out]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def record_criterion():
    """Record a one-line pass/fail summary for the acceptance report."""

    def record(name, ok, detail=""):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import numpy as np
import pytest
from scipy.linalg import sqrtm

from discrim import (
    DegenerateIterationError,
    DomainError,
    Ensemble,
    Povm,
    ValidationError,
    belavkin_weighted,
    evaluate,
    helstrom_two_state,
    hjrf_quadratic,
    holevo_pure_basis,
    jrf_converge,
    jrf_iterate,
    pgm,
    random_mixed_ensemble,
    random_pure_ensemble,
)
from discrim.ensemble import pure_vectors
from discrim.measurement import holevo_vectors

from conftest import basis_ensemble, random_povm_effects, two_pure


def gram_srm_success(priors, psi, power):
    """Success of the square-root measurement for vectors p^{s/2} psi via the Gram matrix.

    With ``phi_k = w_k psi_k`` the measurement satisfies
    ``<e_k|phi_l> = (G_phi^{1/2})_{kl}``, so
    ``P_succ = sum_k p_k |(G_phi^{1/2})_{kk}|^2 / w_k^2``.
    """
    w = priors ** (power / 2)
    g = (psi * w).conj().T @ (psi * w)
    root = sqrtm(g)
    return float(np.sum(priors * np.abs(np.diag(root)) ** 2 / w**2))


class TestPovm:
    def test_uniform(self):
        povm = Povm.uniform(3, 4)
        assert len(povm) == 4 and povm.dim == 3
        np.testing.assert_allclose(sum(povm.effects), np.eye(3))

    def test_effects_frozen(self):
        povm = Povm.uniform(2, 2)
        with pytest.raises(ValueError):
            povm.effects[0][0, 0] = 1.0

    def test_rejects_incomplete(self):
        with pytest.raises(ValidationError, match="identity"):
            Povm([np.eye(2) / 2])

    def test_rejects_non_psd(self):
        with pytest.raises(ValidationError, match="effect 1"):
            Povm([np.diag([1.0, 1.1]), np.diag([0.0, -0.1])])

    def test_residual_completes(self):
        povm = Povm([np.diag([1.0, 0.0])], residual=np.diag([0.0, 1.0]))
        assert povm.residual is not None

    def test_negative_residual_rejected(self):
        with pytest.raises(ValidationError, match="residual"):
            Povm([np.diag([1.0, 1.5])], residual=np.diag([0.0, -0.5]))

    def test_empty(self):
        with pytest.raises(ValidationError):
            Povm([])

    def test_effect_roots_square_back(self, rng):
        povm = Povm(random_povm_effects(rng, 3, 3))
        for root, eff in zip(povm.effect_roots(), povm.effects):
            np.testing.assert_allclose(root @ root, eff, atol=1e-12)


class TestEvaluate:
    def test_basis_is_perfect(self):
        e = basis_ensemble(3)
        rep = evaluate(e, pgm(e))
        assert rep.success == pytest.approx(1.0, abs=1e-14)
        np.testing.assert_allclose(rep.per_outcome, np.eye(3), atol=1e-14)
        assert rep.inconclusive_mass == 0.0

    def test_uniform_povm_success_is_one_over_m(self):
        e = random_mixed_ensemble(3, 4, 2, seed=0)
        assert evaluate(e, Povm.uniform(3, 4)).success == pytest.approx(0.25, abs=1e-14)

    def test_shape_mismatch(self):
        e = two_pure(0.5)
        with pytest.raises(DomainError):
            evaluate(e, Povm.uniform(3, 2))
        with pytest.raises(DomainError):
            evaluate(e, Povm.uniform(2, 3))

    def test_to_dict(self):
        e = two_pure(0.6)
        d = evaluate(e, hjrf_quadratic(e)).to_dict()
        assert set(d) == {"success", "failure", "inconclusive_mass", "per_outcome"}
        assert d["failure"] == pytest.approx(0.1, abs=1e-12)


class TestSquareRootFamily:
    @pytest.mark.parametrize("c", [0.1, 0.3, 0.6, 0.9])
    def test_two_state_quadratic_closed_form(self, c):
        e = two_pure(c)
        expected = (1 - np.sqrt(1 - c * c)) / 2
        assert evaluate(e, hjrf_quadratic(e)).failure == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("power", [1.0, 2.0, 3.0])
    @pytest.mark.parametrize("seed", range(4))
    def test_pure_success_matches_gram_formula(self, power, seed):
        e = random_pure_ensemble(5, 3, priors="random", seed=seed)
        got = evaluate(e, belavkin_weighted(e, power)).success
        assert got == pytest.approx(gram_srm_success(e.priors, pure_vectors(e), power), abs=1e-10)

    def test_rejects_power_below_one(self):
        with pytest.raises(DomainError):
            belavkin_weighted(two_pure(0.5), 0.5)

    def test_residual_on_partial_span(self):
        # two states spanning a 2-dim subspace of C^3
        e = Ensemble.from_pure([0.5, 0.5], [[1, 0, 0], [0.6, 0.8, 0]])
        povm = pgm(e)
        np.testing.assert_allclose(povm.residual, np.diag([0, 0, 1.0]), atol=1e-12)

    def test_single_state_measures_support(self):
        e = Ensemble([1.0], [np.diag([0.5, 0.5, 0.0])])
        povm = hjrf_quadratic(e)
        np.testing.assert_allclose(povm.effects[0], np.diag([1.0, 1.0, 0.0]), atol=1e-12)
        assert evaluate(e, povm).success == pytest.approx(1.0)

    def test_quadratic_equals_belavkin_two(self):
        e = random_mixed_ensemble(3, 3, 2, seed=9)
        for a, b in zip(hjrf_quadratic(e).effects, belavkin_weighted(e, 2).effects):
            np.testing.assert_allclose(a, b, atol=1e-10)

    def test_holevo_vectors_orthonormal_on_span(self):
        e = random_pure_ensemble(4, 3, priors="random", seed=2)
        v = holevo_vectors(e)
        np.testing.assert_allclose(v.conj().T @ v, np.eye(3), atol=1e-10)
        povm = holevo_pure_basis(e)
        assert povm.residual is not None


class TestJrf:
    def test_first_iterate_from_uniform_is_quadratic(self):
        e = random_pure_ensemble(3, 3, priors="random", seed=1)
        first = jrf_iterate(e, Povm.uniform(3, 3))
        for a, b in zip(first.effects, hjrf_quadratic(e).effects):
            np.testing.assert_allclose(a, b, atol=1e-10)

    def test_scale_invariance(self, rng):
        e = random_mixed_ensemble(3, 3, 2, seed=3)
        effs = random_povm_effects(rng, 3, 3)
        a = jrf_iterate(e, effs)
        b = jrf_iterate(e, [7.5 * m for m in effs])
        for x, y in zip(a.effects, b.effects):
            np.testing.assert_allclose(x, y, atol=1e-10)

    def test_degenerate(self):
        e = two_pure(0.5)
        with pytest.raises(DegenerateIterationError):
            jrf_iterate(e, [np.zeros((2, 2)), np.zeros((2, 2))])

    def test_rejects_bad_effects(self):
        e = two_pure(0.5)
        with pytest.raises(DomainError, match="effects"):
            jrf_iterate(e, [np.eye(2)])
        with pytest.raises(DomainError, match="not PSD"):
            jrf_iterate(e, [np.eye(2), -np.eye(2)])
        with pytest.raises(DomainError, match="shape"):
            jrf_iterate(e, [np.eye(2), np.eye(3)])

    @pytest.mark.parametrize("seed", range(3))
    def test_converges_to_helstrom(self, seed):
        e = random_mixed_ensemble(3, 2, 2, seed=seed)
        trace = jrf_converge(e, tol=1e-13, max_iter=3000)
        assert trace.converged
        assert 1 - trace.success_history[-1] == pytest.approx(helstrom_two_state(e), abs=1e-7)
        assert np.all(np.diff(trace.success_history) >= -1e-8)
        assert trace.final is trace.iterates[-1]
        assert trace.iterations == len(trace.iterates) - 1

    def test_max_iter_zero_returns_start(self):
        e = two_pure(0.5)
        trace = jrf_converge(e, max_iter=0)
        assert trace.iterations == 0 and not trace.converged
        assert trace.success_history == [pytest.approx(0.5)]

    def test_custom_start(self):
        e = two_pure(0.6)
        trace = jrf_converge(e, start=hjrf_quadratic(e), max_iter=5)
        assert trace.success_history[0] == pytest.approx(0.9, abs=1e-12)

    @pytest.mark.parametrize("kwargs", [dict(tol=0.0), dict(max_iter=-1)])
    def test_argument_domain(self, kwargs):
        with pytest.raises(DomainError):
            jrf_converge(two_pure(0.5), **kwargs)

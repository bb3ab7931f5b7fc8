import numpy as np
import pytest

from discrim import (
    BoundViolationError,
    DomainError,
    Ensemble,
    Interval,
    Povm,
    approximate_cost,
    barnum_knill_bound,
    bound_report,
    capital_gamma,
    contraction_interval_check,
    curlander_interval,
    evaluate,
    gamma_holevo_pure,
    hjrf_quadratic,
    pgm,
    pgm_pure_upper_bound,
    random_mixed_ensemble,
    random_pure_ensemble,
    s_power_lower_bound,
)
from discrim import bounds as bounds_mod
from discrim.bounds import two_sided_interval

from conftest import basis_ensemble, random_density, random_povm_effects, two_pure


def gamma_two_pure_equiprobable(c):
    # sum_k rho_k / 4 has eigenvalues (1 +- c) / 4
    return 1 - (np.sqrt(1 + c) + np.sqrt(1 - c)) / 2


class TestGamma:
    def test_orthonormal_is_zero(self):
        assert capital_gamma(basis_ensemble(4)) == pytest.approx(0.0, abs=1e-15)

    def test_identical_states(self):
        v = [1.0, 0.0]
        e = Ensemble.from_pure([0.5, 0.5], [v, v])
        assert capital_gamma(e) == pytest.approx(1 - 1 / np.sqrt(2), abs=1e-12)
        assert capital_gamma(e) == pytest.approx(0.2928932, abs=1e-7)
        assert curlander_interval(e).upper == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("c", np.linspace(0.1, 0.9, 9))
    def test_two_pure_closed_form(self, c):
        e = two_pure(c)
        g = capital_gamma(e)
        assert g == pytest.approx(gamma_two_pure_equiprobable(c), abs=1e-13)
        assert g * (2 - g) == pytest.approx((1 - np.sqrt(1 - c * c)) / 2, abs=1e-13)

    def test_c06_values(self):
        g = capital_gamma(two_pure(0.6))
        assert g == pytest.approx(0.0513167, abs=1e-7)
        assert curlander_interval(two_pure(0.6)).upper == pytest.approx(0.1, abs=1e-14)

    def test_commuting_states(self):
        # diagonal states: Gamma = 1 - sum_i sqrt(sum_k p_k^2 lambda_ki^2)
        lam = np.array([[0.7, 0.2, 0.1], [0.1, 0.3, 0.6]])
        p = np.array([0.4, 0.6])
        e = Ensemble(p, [np.diag(x) for x in lam])
        expected = 1 - np.sum(np.sqrt(np.sum((p[:, None] * lam) ** 2, axis=0)))
        assert capital_gamma(e) == pytest.approx(expected, abs=1e-14)

    @pytest.mark.parametrize("seed", range(5))
    def test_holevo_route_agrees_on_rank_deficient(self, seed):
        # two pure states in C^8: most eigenvalues of the weighted operator vanish
        e = random_pure_ensemble(8, 2, priors="random", seed=seed)
        assert gamma_holevo_pure(e) == pytest.approx(capital_gamma(e), abs=1e-13)

    def test_unitary_invariance(self, rng):
        e = random_mixed_ensemble(3, 3, 2, seed=1)
        z = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        u, _ = np.linalg.qr(z)
        f = Ensemble(e.priors, [u @ r @ u.conj().T for r in e.states])
        assert capital_gamma(f) == pytest.approx(capital_gamma(e), abs=1e-13)

    def test_intervals(self):
        e = two_pure(0.6)
        g = capital_gamma(e)
        assert two_sided_interval(e) == Interval(g, 2 * g)
        iv = Interval(0.1, 0.3)
        assert iv.width == pytest.approx(0.2)
        assert iv.contains(0.3) and not iv.contains(0.31)
        assert iv.contains(0.31, tol=0.02)
        assert iv.scaled(2) == Interval(0.2, 0.6)


class TestApproximateCost:
    def test_quadratic_measurement_attains_gamma(self):
        e = random_mixed_ensemble(3, 3, 2, seed=4)
        assert approximate_cost(e, hjrf_quadratic(e)) == pytest.approx(capital_gamma(e), abs=1e-10)

    def test_other_povms_cost_more(self, rng):
        e = random_mixed_ensemble(3, 3, 3, seed=5)
        g = capital_gamma(e)
        for _ in range(20):
            povm = Povm(random_povm_effects(rng, 3, 3))
            assert approximate_cost(e, povm) >= g - 1e-10

    def test_cost_brackets_failure(self):
        e = random_pure_ensemble(3, 3, priors="random", seed=6)
        povm = pgm(e)
        c = approximate_cost(e, povm)
        fail = evaluate(e, povm).failure
        assert c - 1e-12 <= fail <= 2 * c + 1e-12

    def test_shape_check(self):
        with pytest.raises(DomainError):
            approximate_cost(two_pure(0.5), Povm.uniform(2, 3))


class TestSPower:
    def test_s1_is_zero(self):
        e = random_mixed_ensemble(4, 3, 2, seed=0)
        assert s_power_lower_bound(e, 1.0) == pytest.approx(0.0, abs=1e-12)

    def test_s2_is_gamma(self):
        e = random_mixed_ensemble(4, 3, 3, seed=1)
        assert s_power_lower_bound(e, 2.0) == pytest.approx(capital_gamma(e), abs=1e-12)

    @pytest.mark.parametrize("s", [1.5, 3.0, 4.0])
    def test_commuting_closed_form(self, s):
        lam = np.array([[0.5, 0.5, 0.0], [0.0, 0.25, 0.75]])
        p = np.array([0.3, 0.7])
        e = Ensemble(p, [np.diag(x) for x in lam])
        expected = 1 - np.sum(np.sum((p[:, None] * lam) ** s, axis=0) ** (1 / s))
        assert s_power_lower_bound(e, s) == pytest.approx(expected, abs=1e-13)

    def test_domain(self):
        with pytest.raises(DomainError):
            s_power_lower_bound(two_pure(0.5), 0.9)


class TestMiscBounds:
    def test_barnum_knill(self):
        assert barnum_knill_bound(None, 0.1) == pytest.approx(0.19)
        with pytest.raises(DomainError):
            barnum_knill_bound(None, 1.5)

    @pytest.mark.parametrize("seed", range(3))
    def test_pgm_pure_upper_bound_holds(self, seed):
        e = random_pure_ensemble(4, 4, priors="random", seed=seed)
        assert evaluate(e, pgm(e)).failure <= pgm_pure_upper_bound(e) + 1e-12

    def test_pgm_pure_upper_bound_equiprobable(self):
        e = random_pure_ensemble(4, 3, seed=3)
        g = capital_gamma(e)
        assert pgm_pure_upper_bound(e) == pytest.approx(g * (2 - g), abs=1e-10)

    def test_pgm_upper_requires_pure(self):
        with pytest.raises(DomainError):
            pgm_pure_upper_bound(random_mixed_ensemble(2, 2, 2, seed=0))

    def test_contraction_interval_identity_and_zero(self, rng):
        rho = random_density(rng, 3)
        lhs, iv = contraction_interval_check(np.eye(3), rho)
        assert lhs == pytest.approx(0.0, abs=1e-14) and iv.lower == pytest.approx(0.0, abs=1e-14)
        lhs, iv = contraction_interval_check(np.zeros((3, 3)), rho)
        assert lhs == 1.0 and iv == Interval(1.0, 2.0)

    def test_contraction_interval_rectangular_contraction(self, rng):
        rho = random_density(rng, 3)
        q, _ = np.linalg.qr(rng.standard_normal((3, 2)))
        lhs, iv = contraction_interval_check(0.8 * q.T, rho)
        assert iv.contains(lhs, tol=1e-12)

    def test_check_alias(self):
        assert bounds_mod.lemma4_check is bounds_mod.contraction_interval_check

    def test_contraction_interval_rejects(self):
        with pytest.raises(DomainError, match="contraction"):
            contraction_interval_check(2 * np.eye(2), np.eye(2) / 2)
        with pytest.raises(DomainError, match="shape"):
            contraction_interval_check(np.eye(3), np.eye(2) / 2)


class TestBoundReport:
    def test_pure_report(self):
        rep = bound_report(two_pure(0.6))
        assert all(rep.checks.values())
        assert rep.hjrf_failure == pytest.approx(0.1, abs=1e-12)
        assert rep.pure_gamma_holevo == pytest.approx(rep.gamma, abs=1e-13)
        d = rep.to_dict()
        assert [x["s"] for x in d["s_power"]] == [1.0, 1.5, 2.0, 3.0, 4.0]
        assert d["curlander"][1] == pytest.approx(0.1, abs=1e-13)

    def test_mixed_report_has_no_pure_fields(self):
        rep = bound_report(random_mixed_ensemble(3, 2, 2, seed=1), s_list=[2.0])
        assert rep.pure_gamma_holevo is None and rep.pgm_pure_upper is None
        assert rep.s_power[0][1] == pytest.approx(rep.gamma, abs=1e-12)

    def test_violation_raises(self, monkeypatch):
        monkeypatch.setattr(bounds_mod, "capital_gamma", lambda e: 0.5)
        with pytest.raises(BoundViolationError, match="gamma"):
            bound_report(two_pure(0.6))

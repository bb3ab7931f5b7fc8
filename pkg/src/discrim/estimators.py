"""scikit-learn style wrappers around the measurement constructions.

``fit`` takes the ensemble as ``X`` (density matrices or kets), optional
class labels ``y`` (one per state) and priors as ``sample_weight``. A fitted
estimator holds the measurement in ``povm_``; ``predict_proba`` gives
outcome probabilities ``Tr(M_k rho)`` for new states and ``score`` the
prior-weighted success rate.

    >>> from discrim.estimators import SquareRootMeasurement
    >>> est = SquareRootMeasurement(power=2).fit([[1, 0], [0.6, 0.8]])
    >>> round(est.score([[1, 0], [0.6, 0.8]]), 12)
    0.9
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .bounds import bound_report, DEFAULT_S_LIST
from .measurement import belavkin_weighted, evaluate, jrf_converge
from .oracle import certify
from .validation import check_states, make_ensemble

__all__ = ["SquareRootMeasurement", "JRFMeasurement"]


class _MeasurementMixin:
    def _store(self, ensemble, labels, povm):
        self.ensemble_ = ensemble
        self.classes_ = labels
        self.povm_ = povm
        self.n_states_ = ensemble.m
        self.dim_ = ensemble.dim

    def predict_proba(self, X):
        """Outcome probabilities, shape ``(n_samples, n_classes)``.

        Rows sum to less than one when a state has weight outside the span
        the measurement was fitted on (that mass is inconclusive).
        """
        check_is_fitted(self, "povm_")
        states = check_states(X)
        if states.shape[1] != self.dim_:
            raise ValueError(f"states have dimension {states.shape[1]}, fitted on {self.dim_}")
        return np.einsum("kab,nba->nk", self.povm_.stack(), states).real

    def predict(self, X):
        proba = self.predict_proba(X)
        return self.classes_[np.argmax(proba, axis=1)]

    def score(self, X, y=None, sample_weight=None):
        """Success probability on the ensemble ``(X, y, sample_weight)``."""
        check_is_fitted(self, "povm_")
        e, labels = make_ensemble(X, y, sample_weight)
        index = {lab: k for k, lab in enumerate(self.classes_.tolist())}
        try:
            cols = [index[lab] for lab in labels.tolist()]
        except KeyError as exc:
            raise ValueError(f"label {exc.args[0]!r} was not seen in fit") from None
        proba = self.predict_proba(e.stack())
        return float(np.dot(e.priors, proba[np.arange(e.m), cols]))

    def bounds(self, s_list=DEFAULT_S_LIST):
        """Analytic bound report for the fitted ensemble."""
        check_is_fitted(self, "povm_")
        return bound_report(self.ensemble_, s_list)


class SquareRootMeasurement(_MeasurementMixin, BaseEstimator):
    """Belavkin weighted square-root measurement.

    Parameters
    ----------
    power : float, default=2.0
        Weighting exponent ``s >= 1``; 1 gives the pretty good measurement,
        2 the quadratic (HJRF) measurement.
    cutoff : float, optional
        Relative eigenvalue cutoff for the pseudo-inverse square root.
    """

    def __init__(self, power=2.0, cutoff=None):
        self.power = power
        self.cutoff = cutoff

    def fit(self, X, y=None, sample_weight=None):
        e, labels = make_ensemble(X, y, sample_weight)
        self._store(e, labels, belavkin_weighted(e, float(self.power), self.cutoff))
        self.failure_ = evaluate(e, self.povm_).failure
        return self


class JRFMeasurement(_MeasurementMixin, BaseEstimator):
    """Measurement obtained by running the JRF fixed-point iteration.

    Attributes
    ----------
    success_history_ : list of float
    n_iter_ : int
    converged_ : bool
    """

    def __init__(self, tol=1e-10, max_iter=500, cutoff=None):
        self.tol = tol
        self.max_iter = max_iter
        self.cutoff = cutoff

    def fit(self, X, y=None, sample_weight=None):
        e, labels = make_ensemble(X, y, sample_weight)
        trace = jrf_converge(e, tol=self.tol, max_iter=self.max_iter, cutoff=self.cutoff)
        self._store(e, labels, trace.final)
        self.success_history_ = list(trace.success_history)
        self.n_iter_ = trace.iterations
        self.converged_ = trace.converged
        self.failure_ = 1.0 - trace.success_history[-1]
        return self

    def certify(self):
        check_is_fitted(self, "povm_")
        return certify(self.ensemble_, tol=self.tol, max_iter=self.max_iter)

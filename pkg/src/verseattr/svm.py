"""Linear SVM by dual coordinate descent, with Platt-calibrated probabilities.

The binary solver minimizes  (1/2)||w||^2 + C * sum(max(0, 1 - y_i (w.x_i + b)))
(L1 hinge) in the dual, one coordinate at a time, with shrinking disabled.
The bias is handled by augmenting every vector with a constant component of
value 1, so it is regularized along with the weights. Decision values are
mapped to probabilities by fitting a sigmoid p(f) = 1 / (1 + exp(a*f + b))
to held-out decision values.
"""

from __future__ import annotations

import logging
import warnings
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import ConvergenceWarning

from .validation import as_rng, check_feature_matrix, check_fitted, check_signed_labels

logger = logging.getLogger(__name__)


def primal_objective(w_aug: np.ndarray, X_aug: np.ndarray, y: np.ndarray, C: float) -> float:
    margins = 1.0 - y * (X_aug @ w_aug)
    return 0.5 * float(w_aug @ w_aug) + C * float(np.sum(np.clip(margins, 0.0, None)))


def _dual_objective(w_aug: np.ndarray, alpha: np.ndarray) -> float:
    # (1/2) a'Qa - sum(a) with a'Qa == ||w||^2 because w = sum(a_i y_i x_i)
    return 0.5 * float(w_aug @ w_aug) - float(np.sum(alpha))


class LinearSVM(BaseEstimator):
    """Binary L1-hinge linear SVM trained by dual coordinate descent.

    Coordinates are swept in a seeded random permutation each pass; training
    stops when the largest projected-gradient violation drops below ``tol``
    or after ``max_passes`` full passes, in which case ``converged_`` is
    False and a ConvergenceWarning is issued.

    Attributes set by fit: ``weights_``, ``bias_``, ``alpha_`` (dual
    coefficients in [0, C]), ``converged_``, ``n_passes_``,
    ``max_violation_``, ``objective_curve_`` (primal objective per pass) and
    ``dual_objective_curve_``. Coordinate descent decreases the dual
    objective at every step; the primal, evaluated at the running iterate,
    may transiently rise.
    """

    def __init__(
        self,
        C: float = 1.0,
        tol: float = 1e-4,
        max_passes: int = 10_000,
        random_state: int | np.random.Generator | None = 0,
    ):
        self.C = C
        self.tol = tol
        self.max_passes = max_passes
        self.random_state = random_state

    def fit(self, X, y) -> "LinearSVM":
        X = check_feature_matrix(X)
        y = check_signed_labels(y, X.shape[0])
        if self.C <= 0:
            raise ValueError(f"C must be positive, got {self.C}")
        if self.tol <= 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        rng = as_rng(self.random_state)

        n, dim = X.shape
        X_aug = np.hstack([X, np.ones((n, 1))])
        q_diag = np.einsum("ij,ij->i", X_aug, X_aug)  # >= 1 due to the bias column
        alpha = np.zeros(n)
        w = np.zeros(dim + 1)
        C = float(self.C)

        objective = [primal_objective(w, X_aug, y, C)]
        dual_objective = [_dual_objective(w, alpha)]
        max_violation = np.inf
        n_passes = 0
        while n_passes < self.max_passes:
            n_passes += 1
            max_violation = 0.0
            for i in rng.permutation(n):
                g = y[i] * float(w @ X_aug[i]) - 1.0
                a = alpha[i]
                if a <= 0.0:
                    pg = min(g, 0.0)
                elif a >= C:
                    pg = max(g, 0.0)
                else:
                    pg = g
                if pg == 0.0:
                    continue
                max_violation = max(max_violation, abs(pg))
                new_a = min(max(a - g / q_diag[i], 0.0), C)
                delta = new_a - a
                if delta != 0.0:
                    alpha[i] = new_a
                    w += (delta * y[i]) * X_aug[i]
            objective.append(primal_objective(w, X_aug, y, C))
            dual_objective.append(_dual_objective(w, alpha))
            if max_violation < self.tol:
                break

        self.converged_ = max_violation < self.tol
        if not self.converged_:
            warnings.warn(
                f"dual coordinate descent did not converge in {self.max_passes} passes "
                f"(last violation {max_violation:.3g} >= tol {self.tol:.3g})",
                ConvergenceWarning,
            )
        self.weights_ = w[:-1].copy()
        self.bias_ = float(w[-1])
        self.alpha_ = alpha
        self.n_passes_ = n_passes
        self.max_violation_ = float(max_violation)
        self.objective_curve_ = np.asarray(objective)
        self.dual_objective_curve_ = np.asarray(dual_objective)
        self.n_features_in_ = dim
        return self

    def decision_function(self, X) -> np.ndarray:
        check_fitted(self, "weights_")
        X = check_feature_matrix(X, dim=self.weights_.shape[0])
        return X @ self.weights_ + self.bias_


def decision_value(weights: np.ndarray, bias: float, x: Sequence[float]) -> float:
    """w.x + b for a single vector; errors on dimension mismatch."""
    weights = np.asarray(weights, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != weights.shape:
        raise ValueError(f"dimension mismatch: weights {weights.shape} vs x {x.shape}")
    return float(weights @ x + bias)


class PlattConvergenceError(RuntimeError):
    """Sigmoid fit did not converge; carries the last iterate."""

    def __init__(self, message: str, a: float, b: float):
        super().__init__(message)
        self.a = a
        self.b = b


def _sigmoid_nll(z: np.ndarray, targets: np.ndarray) -> float:
    # cross-entropy of p = 1/(1+exp(z)) against soft targets, computed stably
    pos = z >= 0
    out = np.empty_like(z)
    out[pos] = targets[pos] * z[pos] + np.log1p(np.exp(-z[pos]))
    out[~pos] = (targets[~pos] - 1.0) * z[~pos] + np.log1p(np.exp(z[~pos]))
    return float(np.sum(out))


def fit_platt(
    scores,
    y,
    max_iter: int = 100,
    tol: float = 1e-5,
    min_step: float = 1e-10,
    ridge: float = 1e-12,
) -> tuple[float, float]:
    """Fit (a, b) of p(f) = 1/(1+exp(a*f + b)) by Newton's method.

    The likelihood uses the smoothed targets t+ = (N+ + 1)/(N+ + 2) and
    t- = 1/(N- + 2) rather than hard 0/1 labels, which keeps the optimum
    finite even on separable scores. Step sizes are halved until the
    objective decreases (backtracking). Raises PlattConvergenceError,
    carrying the last iterate, if the gradient has not vanished after
    ``max_iter`` iterations or the line search stalls.
    """
    f = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(y).ravel()
    if f.shape != y.shape:
        raise ValueError(f"scores and labels differ in length: {f.shape[0]} vs {y.shape[0]}")
    positive = y > 0
    n_pos = int(np.sum(positive))
    n_neg = f.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("both labels must be present to fit the sigmoid")

    targets = np.where(positive, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))
    a = 0.0
    b = float(np.log((n_neg + 1.0) / (n_pos + 1.0)))
    fval = _sigmoid_nll(a * f + b, targets)

    for _ in range(max_iter):
        z = a * f + b
        p = np.empty_like(z)
        pos = z >= 0
        ez = np.exp(-z[pos])
        p[pos] = ez / (1.0 + ez)
        ez = np.exp(z[~pos])
        p[~pos] = 1.0 / (1.0 + ez)

        d1 = targets - p
        g_a = float(f @ d1)
        g_b = float(np.sum(d1))
        if max(abs(g_a), abs(g_b)) < tol:
            return a, b

        d2 = p * (1.0 - p)
        h11 = float(f @ (d2 * f)) + ridge
        h22 = float(np.sum(d2)) + ridge
        h21 = float(f @ d2)
        det = h11 * h22 - h21 * h21
        da = -(h22 * g_a - h21 * g_b) / det
        db = -(-h21 * g_a + h11 * g_b) / det
        slope = g_a * da + g_b * db  # < 0: Newton direction descends

        step = 1.0
        while step >= min_step:
            na, nb = a + step * da, b + step * db
            new_fval = _sigmoid_nll(na * f + nb, targets)
            if new_fval < fval + 1e-4 * step * slope:
                a, b, fval = na, nb, new_fval
                break
            step *= 0.5
        else:
            raise PlattConvergenceError(
                f"line search failed at gradient ({g_a:.3g}, {g_b:.3g})", a=a, b=b
            )
    raise PlattConvergenceError(f"no convergence within {max_iter} iterations", a=a, b=b)


class PlattScaling(BaseEstimator):
    """Maps decision values to probabilities via a fitted sigmoid."""

    def __init__(self, max_iter: int = 100, tol: float = 1e-5):
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, scores, y) -> "PlattScaling":
        self.a_, self.b_ = fit_platt(scores, y, max_iter=self.max_iter, tol=self.tol)
        return self

    def transform(self, scores) -> np.ndarray:
        check_fitted(self, "a_")
        z = self.a_ * np.asarray(scores, dtype=np.float64) + self.b_
        out = np.empty_like(z, dtype=np.float64)
        pos = z >= 0
        ez = np.exp(-z[pos])
        out[pos] = ez / (1.0 + ez)
        ez = np.exp(z[~pos])
        out[~pos] = 1.0 / (1.0 + ez)
        return out


def _stratified_folds(y: np.ndarray, n_folds: int, rng: np.random.Generator) -> np.ndarray:
    """Fold ids (0..n_folds-1) with each class spread across folds."""
    folds = np.empty(y.shape[0], dtype=np.intp)
    for cls in sorted(set(y.tolist())):
        idx = np.flatnonzero(y == cls)
        idx = idx[rng.permutation(idx.shape[0])]
        folds[idx] = np.arange(idx.shape[0]) % n_folds
    return folds


class CalibratedAuthorClassifier(BaseEstimator, ClassifierMixin):
    """One-vs-rest linear SVMs with per-class Platt calibration.

    Each class's sigmoid is fitted on out-of-sample decision values from an
    internal stratified split of the training data (to avoid the bias of
    calibrating on training decisions); the final per-class model is then
    retrained on all data. With two classes a single underlying model is
    kept and the complement probability is one minus the positive one; with
    more, per-class probabilities are renormalized to sum to 1.
    """

    def __init__(
        self,
        C: float = 1.0,
        tol: float = 1e-4,
        max_passes: int = 10_000,
        calibration_folds: int = 3,
        random_state: int | np.random.Generator | None = 0,
    ):
        self.C = C
        self.tol = tol
        self.max_passes = max_passes
        self.calibration_folds = calibration_folds
        self.random_state = random_state

    def _binary_svm(self, seed) -> LinearSVM:
        return LinearSVM(C=self.C, tol=self.tol, max_passes=self.max_passes, random_state=seed)

    def fit(self, X, y) -> "CalibratedAuthorClassifier":
        X = check_feature_matrix(X)
        y = np.asarray(y, dtype=object).ravel()
        if y.shape[0] != X.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]} labels")
        classes, counts = np.unique(y, return_counts=True)
        if classes.shape[0] < 2:
            raise ValueError("need at least 2 classes")
        thin = [str(c) for c, n in zip(classes, counts) if n < 2]
        if thin:
            raise ValueError(f"every class needs >= 2 examples; too few for: {', '.join(thin)}")
        rng = as_rng(self.random_state)

        n_folds = min(self.calibration_folds, int(counts.min()))
        folds = _stratified_folds(y, n_folds, rng)

        targets = classes[1:2] if classes.shape[0] == 2 else classes
        models: list[LinearSVM] = []
        calibrators: list[PlattScaling] = []
        for cls in targets:
            signs = np.where(y == cls, 1.0, -1.0)
            oos = np.empty(X.shape[0])
            for j in range(n_folds):
                held = folds == j
                svm = self._binary_svm(int(rng.integers(2**63)))
                svm.fit(X[~held], signs[~held])
                oos[held] = svm.decision_function(X[held])
            calibrators.append(PlattScaling().fit(oos, signs))
            models.append(self._binary_svm(int(rng.integers(2**63))).fit(X, signs))

        self.classes_ = classes
        self.models_ = models
        self.calibrators_ = calibrators
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X) -> np.ndarray:
        check_fitted(self, "models_")
        scores = np.column_stack([m.decision_function(X) for m in self.models_])
        return scores[:, 0] if len(self.models_) == 1 else scores

    def predict_proba(self, X) -> np.ndarray:
        check_fitted(self, "models_")
        X = check_feature_matrix(X, dim=self.n_features_in_)
        if len(self.models_) == 1:  # binary: complement is 1 - p
            p = self.calibrators_[0].transform(self.models_[0].decision_function(X))
            return np.column_stack([1.0 - p, p])
        per_class = np.column_stack(
            [
                cal.transform(m.decision_function(X))
                for m, cal in zip(self.models_, self.calibrators_)
            ]
        )
        # guard against all-class float underflow before renormalizing
        per_class = np.maximum(per_class, 1e-300)
        return per_class / per_class.sum(axis=1, keepdims=True)

    def predict(self, X) -> np.ndarray:
        proba = self.predict_proba(X)
        best = np.argmax(proba, axis=1)  # ties resolve to the first (lexicographic) class
        ties = np.sum(proba == proba[np.arange(len(best)), best][:, None], axis=1) > 1
        if np.any(ties):
            logger.info("broke %d exact probability tie(s) toward the first class", int(ties.sum()))
        return self.classes_[best]

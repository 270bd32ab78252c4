"""Input validation helpers shared by the estimators."""

from __future__ import annotations

from typing import Any

import numpy as np
from sklearn.exceptions import NotFittedError


def check_feature_matrix(X: Any, *, dim: int | None = None) -> np.ndarray:
    """Coerce X to a 2-D float64 array of finite values."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D feature matrix, got ndim={X.ndim}")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains non-finite values")
    if dim is not None and X.shape[1] != dim:
        raise ValueError(f"feature dimension mismatch: expected {dim}, got {X.shape[1]}")
    return X


def check_signed_labels(y: Any, n_samples: int) -> np.ndarray:
    """Coerce y to a float64 vector over {-1, +1} with both labels present."""
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.shape[0] != n_samples:
        raise ValueError(f"X has {n_samples} rows but y has {y.shape[0]} entries")
    values = set(np.unique(y))
    if not values <= {-1.0, 1.0}:
        raise ValueError(f"labels must be in {{-1, +1}}, got {sorted(values)}")
    if len(values) < 2:
        raise ValueError("need at least one example of each label")
    return y


def check_fitted(estimator: Any, attribute: str) -> None:
    if getattr(estimator, attribute, None) is None:
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted yet; call fit() first"
        )


def as_rng(seed: Any) -> np.random.Generator:
    """Accepts ints, SeedSequences, or Generators; returns a Generator."""
    return np.random.default_rng(seed)

"""Small input-validation helpers used by the estimators and samplers."""

import numpy as np

from .errors import DomainError


def as_float_array(x, name: str, ndim: int | None = None) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise DomainError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values")
    return arr


def check_X_y(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = as_float_array(X, "X", ndim=2)
    y = as_float_array(y, "y", ndim=1)
    if X.shape[0] != y.shape[0]:
        raise DomainError(f"X and y disagree on sample count: {X.shape[0]} vs {y.shape[0]}")
    if X.shape[0] == 0:
        raise DomainError("need at least one training example")
    return X, y


def check_query(X, dim: int) -> np.ndarray:
    X = as_float_array(X, "X", ndim=2)
    if X.shape[1] != dim:
        raise DomainError(f"query points have {X.shape[1]} columns, model expects {dim}")
    return X


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise DomainError(f"{name} must be a positive finite number, got {value}")
    return value


def check_probabilities(p, name: str = "probabilities") -> np.ndarray:
    p = as_float_array(p, name)
    if p.size and (p.min() < 0.0 or p.max() > 1.0):
        raise DomainError(f"{name} must lie in [0, 1]")
    return p

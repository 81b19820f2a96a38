"""Covariance functions over mixed continuous/categorical encoded inputs.

The surrogate models share one kernel family: an ARD Matérn-5/2 kernel on the
continuous block, a Hamming kernel on the categorical block, combined as

    k(p1, p2) = output_scale * (k_mat + k_ham + k_mat * k_ham)

so the prior variance at any point is 3 * output_scale. The Hamming distance is
normalized to the fraction of differing categorical coordinates, which keeps
the categorical lengthscale comparable across arities.

Encoded inputs follow the DesignSpace layout: the first len(cont_lengthscales)
columns are continuous coordinates in [0, 1], the remaining columns are
integer category indices.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

SQRT5 = np.sqrt(5.0)

LENGTHSCALE_BOUNDS = (5e-3, 10.0)


@dataclass
class KernelParams:
    """Hyperparameters of the mixed kernel plus the fixed observation jitter."""

    output_scale: float = 1.0
    cont_lengthscales: np.ndarray = field(default_factory=lambda: np.ones(1))
    cat_lengthscale: float = 1.0
    jitter: float = 1e-6

    def __post_init__(self):
        self.cont_lengthscales = np.atleast_1d(np.asarray(self.cont_lengthscales, dtype=float))
        lo, hi = LENGTHSCALE_BOUNDS
        if self.output_scale <= 0 or self.cat_lengthscale <= 0 or self.jitter <= 0:
            raise DomainError("kernel parameters must be strictly positive")
        if np.any(self.cont_lengthscales < lo) or np.any(self.cont_lengthscales > hi):
            raise DomainError(f"continuous lengthscales must lie in [{lo}, {hi}]")
        if not (lo <= self.cat_lengthscale <= hi):
            raise DomainError(f"categorical lengthscale must lie in [{lo}, {hi}]")

    @property
    def n_continuous(self) -> int:
        return self.cont_lengthscales.shape[0]


def _scaled_r(a: np.ndarray, b: np.ndarray, lengthscales: np.ndarray) -> float:
    diff = (a - b) / lengthscales
    return float(np.sqrt(np.dot(diff, diff)))


def kernel_matern52(a, b, lengthscales) -> float:
    """Matérn-5/2 correlation with per-dimension lengthscales; in (0, 1]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ls = np.atleast_1d(np.asarray(lengthscales, dtype=float))
    if a.shape != b.shape or a.ndim != 1:
        raise DomainError(f"matern52 inputs must be equal-length vectors, got {a.shape} vs {b.shape}")
    if ls.shape not in ((1,), a.shape):
        raise DomainError("lengthscales must be scalar or match the input dimension")
    if np.any(ls <= 0):
        raise DomainError("lengthscales must be positive")
    r = _scaled_r(a, b, ls)
    return float((1.0 + SQRT5 * r + 5.0 * r * r / 3.0) * np.exp(-SQRT5 * r))


def kernel_hamming(a, b, lengthscale: float) -> float:
    """exp(-HD/lengthscale) with HD the fraction of differing categorical coords."""
    a = np.atleast_1d(np.asarray(a))
    b = np.atleast_1d(np.asarray(b))
    if a.shape != b.shape:
        raise DomainError(f"hamming inputs must have equal arity, got {a.shape} vs {b.shape}")
    if lengthscale <= 0:
        raise DomainError("lengthscale must be positive")
    if a.size == 0:
        return 1.0
    hd = float(np.mean(a != b))
    return float(np.exp(-hd / lengthscale))


def kernel_mixed(p1, p2, params: KernelParams) -> float:
    """Full mixed kernel: output_scale * (k_mat + k_ham + k_mat * k_ham)."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if p1.shape != p2.shape or p1.ndim != 1:
        raise DomainError("mixed-kernel inputs must be equal-length encoded vectors")
    nc = params.n_continuous
    if p1.shape[0] < nc:
        raise DomainError(
            f"encoded point has {p1.shape[0]} coords but params expect >= {nc} continuous"
        )
    km = kernel_matern52(p1[:nc], p2[:nc], params.cont_lengthscales)
    if p1.shape[0] == nc:
        return params.output_scale * km
    kh = kernel_hamming(p1[nc:], p2[nc:], params.cat_lengthscale)
    return params.output_scale * (km + kh + km * kh)


# -- vectorized Gram machinery (used by the estimators) -------------------------


def _sq_dists_per_dim(A: np.ndarray, B: np.ndarray, ls: np.ndarray) -> np.ndarray:
    # (n, m, d) scaled squared differences; small n makes the memory fine
    diff = (A[:, None, :] - B[None, :, :]) / ls
    return diff * diff


def matern52_gram(A: np.ndarray, B: np.ndarray, lengthscales: np.ndarray) -> np.ndarray:
    d2 = _sq_dists_per_dim(A, B, np.asarray(lengthscales, dtype=float)).sum(axis=2)
    r = np.sqrt(np.maximum(d2, 0.0))
    return (1.0 + SQRT5 * r + 5.0 * d2 / 3.0) * np.exp(-SQRT5 * r)


def hamming_gram(A: np.ndarray, B: np.ndarray, lengthscale: float) -> np.ndarray:
    if A.shape[1] == 0:
        return np.ones((A.shape[0], B.shape[0]))
    hd = np.mean(A[:, None, :] != B[None, :, :], axis=2)
    return np.exp(-hd / lengthscale)


def split_encoded(X: np.ndarray, n_continuous: int) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    return X[:, :n_continuous], X[:, n_continuous:]


def mixed_gram(A: np.ndarray, B: np.ndarray, params: KernelParams) -> np.ndarray:
    """Cross-covariance matrix of two encoded point sets."""
    nc = params.n_continuous
    Ac, Ad = split_encoded(A, nc)
    Bc, Bd = split_encoded(B, nc)
    km = matern52_gram(Ac, Bc, params.cont_lengthscales)
    kh = hamming_gram(Ad, Bd, params.cat_lengthscale)
    return params.output_scale * (km + kh + km * kh)


def mixed_gram_with_grads(A: np.ndarray, params: KernelParams):
    """Self-Gram matrix plus its derivatives w.r.t. the log hyperparameters.

    Returns (K, grads) where grads maps each of 'log_output_scale',
    'log_lengthscale_<d>' and 'log_cat_lengthscale' to an (n, n) matrix.
    Used by the marginal-likelihood optimizer; derivatives of the Matérn-5/2
    correlation come from dk/dr = -(5/3) r (1 + sqrt5 r) exp(-sqrt5 r).
    """
    nc = params.n_continuous
    Ac, Ad = split_encoded(A, nc)
    ls = params.cont_lengthscales
    d2_per_dim = _sq_dists_per_dim(Ac, Ac, ls)
    d2 = d2_per_dim.sum(axis=2)
    r = np.sqrt(np.maximum(d2, 0.0))
    e = np.exp(-SQRT5 * r)
    km = (1.0 + SQRT5 * r + 5.0 * d2 / 3.0) * e
    if Ad.shape[1]:
        hd = np.mean(Ad[:, None, :] != Ad[None, :, :], axis=2)
        kh = np.exp(-hd / params.cat_lengthscale)
    else:
        hd = np.zeros_like(km)
        kh = np.ones_like(km)
    K = params.output_scale * (km + kh + km * kh)

    grads: dict[str, np.ndarray] = {"log_output_scale": K.copy()}
    # d k_mat / d log ls_d = (5/3)(1 + sqrt5 r) e^(-sqrt5 r) * (delta_d / ls_d)^2
    base = (5.0 / 3.0) * (1.0 + SQRT5 * r) * e
    for d in range(nc):
        dkm = base * d2_per_dim[:, :, d]
        grads[f"log_lengthscale_{d}"] = params.output_scale * dkm * (1.0 + kh)
    if Ad.shape[1]:
        dkh = kh * hd / params.cat_lengthscale
        grads["log_cat_lengthscale"] = params.output_scale * dkh * (1.0 + km)
    return K, grads

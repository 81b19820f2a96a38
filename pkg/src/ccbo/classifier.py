"""Variational Gaussian-process binary classifier with a Probit likelihood.

Models experiment feasibility as P(y = +1 | x) where the latent function
carries the same constant-mean / mixed-kernel prior as the regression
surrogate. The variational posterior at the inducing points (all training
inputs; campaigns stay small) is parameterized in the tied form

    m = mu0 * 1 + K alpha,        S = (K^-1 + diag(lambda))^-1,

which contains the optimum of the evidence lower bound for log-concave
likelihoods while keeping the parameter count at 2n. The expected
log-likelihood uses Gauss-Hermite quadrature with nodes summed in symmetric
pairs, so flipping every training label mirrors the whole optimization
trajectory and maps predictions p -> 1 - p.

Predictive probabilities use the analytic Gaussian-Probit integral
P(+1 | x) = ndtr(mu_f / sqrt(1 + var_f)).
"""

import math
from functools import lru_cache

import numpy as np
from scipy.linalg import LinAlgError, cholesky, solve_triangular
from scipy.optimize import minimize
from scipy.special import log_ndtr, ndtr
from sklearn.base import BaseEstimator

from .errors import DomainError, NumericError
from .kernels import KernelParams, mixed_gram
from .validation import check_query, check_X_y

_BAD_OBJECTIVE = 1e25
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@lru_cache(maxsize=8)
def _gh_pairs(n_nodes: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Positive Gauss-Hermite nodes with weights, plus the center-node weight (0 if even)."""
    nodes, weights = np.polynomial.hermite.hermgauss(n_nodes)
    pos = nodes > 1e-12
    center = float(weights[np.abs(nodes) <= 1e-12].sum())
    return nodes[pos], weights[pos], center


def _log_phi_ratio(u: np.ndarray) -> np.ndarray:
    """phi(u) / Phi(u), computed in log space for stability at u << 0."""
    return np.exp(-0.5 * u * u - _LOG_SQRT_2PI - log_ndtr(u))


def probit_probability(mean, variance):
    """Analytic Gaussian-Probit integral: P(y=+1) = Phi(mu / sqrt(1 + var))."""
    mean = np.asarray(mean, dtype=float)
    variance = np.asarray(variance, dtype=float)
    return ndtr(mean / np.sqrt(1.0 + variance))


def expected_log_likelihood(means, variances, labels, n_nodes: int = 20) -> float:
    """Sum_i E_{N(means_i, variances_i)}[log Phi(labels_i * f)] by quadrature."""
    m = np.asarray(means, dtype=float)
    v = np.maximum(np.asarray(variances, dtype=float), 1e-12)
    y = np.asarray(labels, dtype=float)
    t, w, w0 = _gh_pairs(n_nodes)
    c = np.sqrt(2.0 * v)[:, None]
    z_plus = m[:, None] + c * t[None, :]
    z_minus = m[:, None] - c * t[None, :]
    terms = log_ndtr(y[:, None] * z_plus) + log_ndtr(y[:, None] * z_minus)
    total = (terms @ w) / math.sqrt(math.pi)
    if w0:
        total = total + w0 / math.sqrt(math.pi) * log_ndtr(y * m)
    return float(np.sum(total))


class VariationalProbitClassifier(BaseEstimator):
    """ELBO-trained GP classifier over encoded mixed inputs.

    Kernel hyperparameters and variational parameters ascend the ELBO jointly
    (L-BFGS-B; analytic gradients for the variational block, finite differences
    for the few kernel parameters). With fewer than 2 examples of every class
    the model reports 0.5 everywhere so early acquisition is not distorted.
    """

    def __init__(
        self,
        n_continuous: int = 1,
        n_restarts: int = 4,
        max_iter: int = 150,
        quad_nodes: int = 20,
        jitter: float = 1e-6,
        output_scale_bounds: tuple[float, float] = (1.0, 25.0),
        lengthscale_bounds: tuple[float, float] = (0.15, 0.3),
        mean_bound: float = 0.0,
        random_state: int | None = None,
    ):
        self.n_continuous = n_continuous
        self.n_restarts = n_restarts
        self.max_iter = max_iter
        self.quad_nodes = quad_nodes
        self.jitter = jitter
        self.output_scale_bounds = output_scale_bounds
        self.lengthscale_bounds = lengthscale_bounds
        self.mean_bound = mean_bound
        self.random_state = random_state

    # -- parameter layout: [log_oscale, log_ls*nc, (log_cat_ls), mu0, alpha*n, lraw*n]

    def _n_kernel(self, has_cat: bool) -> int:
        return 1 + self.n_continuous + (1 if has_cat else 0)

    def _unpack_kernel(self, theta: np.ndarray, has_cat: bool) -> tuple[KernelParams, float]:
        nc = self.n_continuous
        params = KernelParams(
            output_scale=math.exp(theta[0]),
            cont_lengthscales=np.exp(theta[1 : 1 + nc]),
            cat_lengthscale=math.exp(theta[1 + nc]) if has_cat else 1.0,
            jitter=self.jitter,
        )
        return params, float(theta[self._n_kernel(has_cat)])

    def _elbo_parts(self, theta: np.ndarray, X: np.ndarray, y: np.ndarray, want_grad: bool):
        n = X.shape[0]
        has_cat = X.shape[1] > self.n_continuous
        nk = self._n_kernel(has_cat)
        try:
            params, mu0 = self._unpack_kernel(theta, has_cat)
        except DomainError:
            return None
        alpha = theta[nk + 1 : nk + 1 + n]
        lraw = theta[nk + 1 + n :]
        lam = np.exp(lraw)

        K = mixed_gram(X, X, params) + self.jitter * np.eye(n)
        w_half = np.sqrt(lam)
        B = np.eye(n) + (w_half[:, None] * K) * w_half[None, :]
        try:
            L_B = cholesky(B, lower=True)
        except LinAlgError:
            return None
        # S = K - K W B^-1 W K via T = L_B^-1 W K
        T = solve_triangular(L_B, w_half[:, None] * K, lower=True)
        S = K - T.T @ T
        s_diag = np.maximum(np.diag(S), 1e-12)
        Kalpha = K @ alpha
        m = mu0 + Kalpha

        L_B_inv = solve_triangular(L_B, np.eye(n), lower=True)
        tr_Binv = float(np.sum(L_B_inv * L_B_inv))
        logdet_B = 2.0 * float(np.sum(np.log(np.diag(L_B))))
        kl = 0.5 * (tr_Binv + float(alpha @ Kalpha) - n + logdet_B)

        t, w, w0 = _gh_pairs(self.quad_nodes)
        c = np.sqrt(2.0 * s_diag)[:, None]
        z_plus = m[:, None] + c * t[None, :]
        z_minus = m[:, None] - c * t[None, :]
        u_plus = y[:, None] * z_plus
        u_minus = y[:, None] * z_minus
        log_terms = log_ndtr(u_plus) + log_ndtr(u_minus)
        ell_rows = (log_terms @ w) / math.sqrt(math.pi)
        if w0:
            ell_rows = ell_rows + (w0 / math.sqrt(math.pi)) * log_ndtr(y * m)
        elbo = float(np.sum(ell_rows)) - kl
        if not want_grad:
            return elbo, None

        r_plus = _log_phi_ratio(u_plus)
        r_minus = _log_phi_ratio(u_minus)
        gamma = y * ((r_plus + r_minus) @ w) / math.sqrt(math.pi)
        delta = y * (((r_plus - r_minus) * (t[None, :] / c)) @ w) / math.sqrt(math.pi)
        if w0:
            r0 = _log_phi_ratio(y * m)
            gamma = gamma + (w0 / math.sqrt(math.pi)) * y * r0

        grad = np.zeros_like(theta)
        grad[nk] = float(np.sum(gamma))                      # mu0
        grad[nk + 1 : nk + 1 + n] = K @ (gamma - alpha)      # alpha
        S_sq = S * S
        slam_s = S_sq @ lam
        grad_lam = -(S_sq.T @ delta) - 0.5 * slam_s
        grad[nk + 1 + n :] = grad_lam * lam                  # chain rule for log-lambda
        return elbo, grad

    def _objective(self, theta: np.ndarray, X: np.ndarray, y: np.ndarray):
        out = self._elbo_parts(theta, X, y, want_grad=True)
        if out is None:
            return _BAD_OBJECTIVE, np.zeros_like(theta)
        elbo, grad = out
        has_cat = X.shape[1] > self.n_continuous
        nk = self._n_kernel(has_cat)
        # kernel block by forward differences; everything else is analytic
        h = 1e-6
        for k in range(nk):
            shifted = theta.copy()
            shifted[k] += h
            out_k = self._elbo_parts(shifted, X, y, want_grad=False)
            f_k = out_k[0] if out_k is not None else -_BAD_OBJECTIVE
            grad[k] = (f_k - elbo) / h
        return -elbo, -grad

    def _bounds(self, n: int, has_cat: bool):
        lo, hi = (math.log(b) for b in self.lengthscale_bounds)
        # Amplitude and lengthscales are bounded away from zero: unconstrained
        # ELBO ascent on a handful of points collapses either to the base-rate
        # solution (zero signal) or to per-point islands (no generalization).
        # The latent mean is pinned near zero (default: exactly zero) so regions
        # without evidence stay near-uninformative instead of inheriting the
        # campaign's failure base rate, which would starve exploration when the
        # probability is weighted into the acquisition.
        bounds = [tuple(math.log(b) for b in self.output_scale_bounds)]
        bounds += [(lo, hi)] * self.n_continuous
        if has_cat:
            bounds.append((lo, hi))
        bounds.append((-self.mean_bound, self.mean_bound))
        bounds += [(None, None)] * n
        bounds += [(-12.0, 4.0)] * n
        return bounds

    # -- fitting -------------------------------------------------------------

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        labels = set(np.unique(y))
        if not labels <= {-1.0, 1.0}:
            raise DomainError(f"labels must be in {{-1, +1}}, got {sorted(labels)}")
        self.X_ = X
        self.y_ = y
        self.classes_ = np.array([-1.0, 1.0])
        n_pos = int(np.sum(y > 0))
        n_neg = int(np.sum(y < 0))
        self.cold_start_ = n_pos < 2 and n_neg < 2
        if self.cold_start_:
            self.params_ = None
            self.optimizer_trace_ = []
            return self

        n = X.shape[0]
        has_cat = X.shape[1] > self.n_continuous
        nc = self.n_continuous
        rng = np.random.default_rng(self.random_state)
        os_lo, os_hi = self.output_scale_bounds
        starts = []
        ls0 = min(max(0.25, self.lengthscale_bounds[0]), self.lengthscale_bounds[1])
        base = np.concatenate(
            [
                [math.log(min(max(3.0, os_lo), os_hi))],
                np.full(nc, math.log(ls0)),
                [math.log(ls0)] if has_cat else [],
                [0.0],                       # mu0
                np.zeros(n),                 # alpha, replaced below
                np.full(n, math.log(0.5)),   # log lambda
            ]
        )
        starts.append(base)
        ls_lo = max(0.05, self.lengthscale_bounds[0])
        ls_hi = min(2.0, self.lengthscale_bounds[1])
        for _ in range(max(0, self.n_restarts - 1)):
            x0 = base.copy()
            x0[0] = rng.uniform(math.log(max(os_lo, 1.0)), math.log(min(os_hi, 10.0)))
            x0[1 : 1 + nc] = rng.uniform(math.log(ls_lo), math.log(ls_hi), size=nc)
            if has_cat:
                x0[1 + nc] = rng.uniform(math.log(ls_lo), math.log(ls_hi))
            starts.append(x0)
        # warm-start alpha so the initial latent mean already tracks the labels;
        # the base-rate solution is a local ELBO optimum that traps a zero start
        nk = self._n_kernel(has_cat)
        for x0 in starts:
            params, _ = self._unpack_kernel(x0, has_cat)
            K0 = mixed_gram(X, X, params) + (self.jitter + 1e-8) * np.eye(n)
            x0[nk + 1 : nk + 1 + n] = np.linalg.solve(K0, 1.5 * y)

        bounds = self._bounds(n, has_cat)
        best = None
        trace = []
        for x0 in starts:
            f0, _ = self._objective(x0, X, y)
            res = minimize(
                self._objective,
                x0,
                args=(X, y),
                jac=True,
                method="L-BFGS-B",
                bounds=bounds,
                options={"maxiter": self.max_iter},
            )
            trace.append((-f0, -res.fun))
            if best is None or res.fun < best.fun:
                best = res
        self.optimizer_trace_ = trace
        self.elbo_ = -best.fun
        self._finalize(best.x)
        return self

    def _finalize(self, theta: np.ndarray):
        n = self.X_.shape[0]
        has_cat = self.X_.shape[1] > self.n_continuous
        nk = self._n_kernel(has_cat)
        self.params_, self.mean_constant_ = self._unpack_kernel(theta, has_cat)
        self.alpha_ = theta[nk + 1 : nk + 1 + n].copy()
        self.lambda_ = np.exp(theta[nk + 1 + n :])
        K = mixed_gram(self.X_, self.X_, self.params_) + self.jitter * np.eye(n)
        self.K_ = K
        w_half = np.sqrt(self.lambda_)
        B = np.eye(n) + (w_half[:, None] * K) * w_half[None, :]
        try:
            self.L_B_ = cholesky(B, lower=True)
        except LinAlgError:
            raise NumericError("variational covariance factorization failed")
        self.w_half_ = w_half
        T = solve_triangular(self.L_B_, w_half[:, None] * K, lower=True)
        self.variational_cov_ = K - T.T @ T
        self.variational_mean_ = self.mean_constant_ + K @ self.alpha_

    # -- inference -----------------------------------------------------------

    def latent(self, Xq) -> tuple[np.ndarray, np.ndarray]:
        """Marginal latent mean and variance at the query points."""
        if self.cold_start_:
            raise DomainError("latent marginals are unavailable for a cold-start model")
        Xq = check_query(Xq, self.X_.shape[1])
        Kx = mixed_gram(self.X_, Xq, self.params_)       # (n, m)
        mu = self.mean_constant_ + Kx.T @ self.alpha_
        V = solve_triangular(self.L_B_, self.w_half_[:, None] * Kx, lower=True)
        has_cat = self.X_.shape[1] > self.n_continuous
        prior_var = (3.0 if has_cat else 1.0) * self.params_.output_scale
        var = np.maximum(prior_var + self.jitter - np.sum(V * V, axis=0), 1e-12)
        return mu, var

    def prob_feasible(self, Xq) -> np.ndarray:
        """P(y = +1 | x) via the analytic Gaussian-Probit integral."""
        Xq = check_query(np.asarray(Xq, dtype=float), self.X_.shape[1])
        if self.cold_start_:
            return np.full(Xq.shape[0], 0.5)
        mu, var = self.latent(Xq)
        return probit_probability(mu, var)

    def predict_proba(self, Xq) -> np.ndarray:
        p = self.prob_feasible(Xq)
        return np.column_stack([1.0 - p, p])

    def predict(self, Xq) -> np.ndarray:
        return np.where(self.prob_feasible(Xq) >= 0.5, 1.0, -1.0)

    def elbo(self, X=None, y=None) -> float:
        """ELBO of the fitted variational distribution on the given data."""
        if self.cold_start_:
            raise DomainError("cold-start model has no variational distribution")
        if X is None:
            X, y = self.X_, self.y_
        else:
            X, y = check_X_y(X, y)
        mu, var = self.latent(X)
        ell = expected_log_likelihood(mu, var, y, n_nodes=self.quad_nodes)
        return ell - self.kl_divergence()

    def kl_divergence(self) -> float:
        """KL(q || prior) at the inducing points; zero when q equals the prior."""
        if self.cold_start_:
            raise DomainError("cold-start model has no variational distribution")
        n = self.X_.shape[0]
        L_B_inv = solve_triangular(self.L_B_, np.eye(n), lower=True)
        tr_Binv = float(np.sum(L_B_inv * L_B_inv))
        logdet_B = 2.0 * float(np.sum(np.log(np.diag(self.L_B_))))
        quad = float(self.alpha_ @ self.K_ @ self.alpha_)
        return 0.5 * (tr_Binv + quad - n + logdet_B)

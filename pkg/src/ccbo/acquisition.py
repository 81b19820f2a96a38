"""Monte-Carlo batch acquisition functions and the candidate-batch optimizer.

All acquisition values are sample means of clamped improvements

    qEI:    (1/N) sum_i max_j max(y_ij - g*, 0)
    qEICF:  (1/N) sum_i max_j max(-(s_ij - s0)^2 - g*, 0)

over joint posterior draws y_ij (reparameterized: one shared set of base
samples per optimizer call keeps the surface deterministic and continuous in
the continuous inputs). Constrained variants multiply each point's improvement
by its feasibility probability inside the max over the batch, so one
infeasible point does not cancel its batch partner.

The optimizer enumerates all joint categorical assignments for the q-batch and
runs multi-start coordinate-descent refinement on the continuous block.
"""

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .errors import DomainError
from .gp import GPRegressor
from .space import DesignPoint, DesignSpace
from .validation import check_probabilities

MODES = ("qei", "qei-constrained", "qeicf", "qeicf-constrained")

#: Incumbent stand-in when no feasible observation exists. Large enough that
#: any feasible draw is an improvement, small enough that squared distances
#: (<= ~1e4 on the bundled problem) survive float resolution in the MC mean.
NO_INCUMBENT = -1.0e9

N_RANDOM_STARTS = 64
N_POLISH_TOP = 4
N_PROBE = 256
_STEP_INIT = 0.25
_STEP_MIN = 1e-3


@dataclass
class AcquisitionConfig:
    """Mode plus the numbers that define one acquisition evaluation."""

    mode: str = "qeicf-constrained"
    mc_samples: int = 512
    q: int = 2
    target: float | None = None
    incumbent: float = NO_INCUMBENT
    output_mean: float = 0.0
    output_scale: float = 1.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"unknown acquisition mode {self.mode!r}")
        if self.mc_samples < 1 or self.q < 1:
            raise DomainError("mc_samples and q must both be >= 1")
        if self.composite and self.target is None:
            raise DomainError(f"mode {self.mode!r} requires a target value")

    @property
    def composite(self) -> bool:
        return self.mode.startswith("qeicf")

    @property
    def constrained(self) -> bool:
        return self.mode.endswith("-constrained")


@dataclass
class BatchProposal:
    points: list[DesignPoint]
    value: float
    feasibility: tuple[float, ...]
    exploration_fallback: bool = False


def qei(samples, incumbent: float) -> float:
    """Batch expected improvement from joint posterior draws (N rows, q columns)."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise DomainError("qei needs at least one Monte-Carlo draw")
    if samples.ndim == 1:
        samples = samples[:, None]
    imp = np.maximum(samples - incumbent, 0.0)
    return float(imp.max(axis=1).mean())


def qei_cf(size_samples, target: float, incumbent: float) -> float:
    """Composite batch EI: the squared-distance objective applied to size draws."""
    size_samples = np.asarray(size_samples, dtype=float)
    if size_samples.size == 0:
        raise DomainError("qei_cf needs at least one Monte-Carlo draw")
    if size_samples.ndim == 1:
        size_samples = size_samples[:, None]
    obj = -((size_samples - target) ** 2)
    imp = np.maximum(obj - incumbent, 0.0)
    return float(imp.max(axis=1).mean())


def apply_constraint(per_point_improvements, p_feas) -> float:
    """Feasibility-weighted acquisition: weight each point inside the batch max."""
    imp = np.asarray(per_point_improvements, dtype=float)
    if imp.ndim == 1:
        imp = imp[:, None]
    p = check_probabilities(p_feas, "p_feas")
    if p.shape != (imp.shape[1],):
        raise DomainError(f"p_feas must have one entry per batch point, got {p.shape}")
    return float((imp * p[None, :]).max(axis=1).mean())


def normal_base_samples(n: int, q: int, seed: int) -> np.ndarray:
    """Scrambled low-discrepancy standard-normal draws of shape (n, q)."""
    engine = qmc.Sobol(d=q, scramble=True, seed=seed)
    u = engine.random(n)
    return ndtri(np.clip(u, 1e-12, 1.0 - 1e-12))


def _batched_cholesky(covs: np.ndarray) -> np.ndarray:
    jitter = 0.0
    eye = np.eye(covs.shape[-1])
    while True:
        try:
            return np.linalg.cholesky(covs + jitter * eye)
        except np.linalg.LinAlgError:
            jitter = max(jitter * 10.0, 1e-10)
            if jitter > 1e-2:
                raise


class _BatchEvaluator:
    """Evaluates the configured acquisition for stacks of candidate batches."""

    def __init__(self, model: GPRegressor, classifier, config: AcquisitionConfig, base: np.ndarray):
        self.model = model
        self.classifier = classifier
        self.config = config
        self.base = base

    def improvements(self, draws_std: np.ndarray) -> np.ndarray:
        cfg = self.config
        raw = draws_std * cfg.output_scale + cfg.output_mean
        if cfg.composite:
            obj = -((raw - cfg.target) ** 2)
        else:
            obj = raw
        return np.maximum(obj - cfg.incumbent, 0.0)

    def __call__(self, Xb: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Xb: (M, q, d) candidate batches -> (values (M,), p_feas (M, q))."""
        M, q, d = Xb.shape
        means, covs = self.model.posterior_batch(Xb)
        L = _batched_cholesky(covs)
        draws = means[:, None, :] + np.einsum("mqr,nr->mnq", L, self.base)
        imp = self.improvements(draws)
        if self.config.constrained:
            p = self.classifier.prob_feasible(Xb.reshape(M * q, d)).reshape(M, q)
        else:
            p = np.ones((M, q))
        vals = (imp * p[:, None, :]).max(axis=2).mean(axis=1)
        return vals, p


def _categorical_combos(space: DesignSpace, q: int):
    per_point = list(itertools.product(*(range(len(v.categories)) for v in space.categorical)))
    return list(itertools.product(per_point, repeat=q))


def _assemble(space: DesignSpace, cont: np.ndarray, combo) -> np.ndarray:
    """cont: (M, q, d_c) plus one categorical assignment -> encoded (M, q, d)."""
    M, q, _ = cont.shape
    Xb = np.empty((M, q, space.dim))
    Xb[:, :, : space.n_continuous] = cont
    for j in range(q):
        Xb[:, j, space.n_continuous :] = np.asarray(combo[j], dtype=float)
    return Xb


def optimize_acquisition(
    objective_model: GPRegressor,
    classifier,
    space: DesignSpace,
    config: AcquisitionConfig,
    seed: int,
) -> BatchProposal:
    """Best q-batch found by categorical enumeration + continuous refinement.

    Deterministic given (models, config, seed): base samples are drawn once and
    shared by every candidate evaluation in this call.
    """
    if config.constrained and classifier is None:
        raise DomainError(f"mode {config.mode!r} requires a fitted classifier")
    q, d_c = config.q, space.n_continuous
    base = normal_base_samples(config.mc_samples, q, seed)
    evaluate = _BatchEvaluator(objective_model, classifier, config, base)
    rng = np.random.default_rng(seed)

    best_val = -np.inf
    best_Xb = None
    best_p = None
    for combo in _categorical_combos(space, q):
        cont = rng.random((N_RANDOM_STARTS, q, d_c))
        Xb = _assemble(space, cont, combo)
        vals, _ = evaluate(Xb)
        top = np.argsort(vals)[::-1][:N_POLISH_TOP]
        polished, pvals = _coordinate_descent(evaluate, Xb[top], d_c)
        k = int(np.argmax(pvals))
        if pvals[k] > best_val:
            best_val = float(pvals[k])
            best_Xb = polished[k]
            _, p = evaluate(polished[k][None])
            best_p = p[0]
        # cheap probe guards against a poor multi-start draw
        probe = _assemble(space, rng.random((N_PROBE, q, d_c)), combo)
        pv, _ = evaluate(probe)
        j = int(np.argmax(pv))
        if pv[j] > best_val:
            refined, rvals = _coordinate_descent(evaluate, probe[j][None], d_c)
            if rvals[0] > best_val:
                best_val = float(rvals[0])
                best_Xb = refined[0]
                _, p = evaluate(refined[0][None])
                best_p = p[0]

    if best_val <= 0.0 and classifier is not None:
        return _feasibility_fallback(classifier, space, config, rng)

    points = [space.from_unit(best_Xb[j]) for j in range(q)]
    return BatchProposal(
        points=points,
        value=max(best_val, 0.0),
        feasibility=tuple(float(x) for x in best_p),
        exploration_fallback=best_val <= 0.0,
    )


def _coordinate_descent(evaluate, Xb: np.ndarray, d_c: int, max_sweeps_per_level: int = 4):
    """Shrinking-step coordinate search over the continuous block of each batch.

    Each sweep evaluates every +/-step single-coordinate move of every batch in
    one stacked call and applies the best improving move per batch. Sweeps per
    step level are bounded so the fine levels cannot churn.
    """
    cur = Xb.copy()
    vals, _ = evaluate(cur)
    T, q, _ = cur.shape
    n_moves = 2 * q * d_c
    step = _STEP_INIT
    while step >= _STEP_MIN:
        for _ in range(max_sweeps_per_level):
            proposals = np.repeat(cur, n_moves, axis=0)
            m = 0
            for t in range(T):
                for j in range(q):
                    for k in range(d_c):
                        for sign in (step, -step):
                            proposals[m, j, k] = np.clip(cur[t, j, k] + sign, 0.0, 1.0)
                            m += 1
            pv, _ = evaluate(proposals)
            pv = pv.reshape(T, n_moves)
            improved = False
            for t in range(T):
                b = int(np.argmax(pv[t]))
                if pv[t, b] > vals[t] + 1e-15:
                    cur[t] = proposals[t * n_moves + b]
                    vals[t] = pv[t, b]
                    improved = True
            if not improved:
                break
        step *= 0.5
    return cur, vals


def _feasibility_fallback(classifier, space: DesignSpace, config: AcquisitionConfig, rng) -> BatchProposal:
    """No candidate improves the incumbent anywhere: chase feasibility instead."""
    q, d_c = config.q, space.n_continuous
    cat_choices = list(itertools.product(*(range(len(v.categories)) for v in space.categorical)))
    singles = []
    for cats in cat_choices:
        cont = rng.random((N_PROBE, 1, d_c))
        Xb = _assemble(space, cont, (cats,))
        singles.append(Xb[:, 0, :])
    X = np.concatenate(singles)
    p = classifier.prob_feasible(X)
    order = np.argsort(p)[::-1]
    chosen = X[order[:q]]
    points = [space.from_unit(row) for row in chosen]
    return BatchProposal(
        points=points,
        value=0.0,
        feasibility=tuple(float(x) for x in p[order[:q]]),
        exploration_fallback=True,
    )

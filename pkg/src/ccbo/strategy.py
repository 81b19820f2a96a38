"""The four suggestion strategies plus campaign-level bookkeeping.

Strategies
----------
random       uniform sampling in encoded space (log-uniform flow rate)
vanilla      GP on the objective y = -(s - target)^2, plain batch EI
constrained  same objective GP, EI weighted by a feasibility classifier
ccbo         GP on the size s itself; the squared-distance transform is applied
             inside the acquisition (composite EI), feasibility-weighted

The incumbent and the regret consider feasible observations only by default
(matching lab practice, where failed runs are discarded); infeasible runs
still carry a measured size and do train the objective surrogate. A state
switch exposes the include-everything alternative.
"""

import math
import os
import zlib
from dataclasses import dataclass, replace

import numpy as np

from .acquisition import NO_INCUMBENT, AcquisitionConfig, optimize_acquisition
from .classifier import VariationalProbitClassifier
from .errors import DomainError
from .gp import GPRegressor
from .space import DesignPoint, DesignSpace, standardize

STRATEGIES = ("random", "vanilla", "constrained", "ccbo")

_ACQUISITION_MODE = {
    "vanilla": "qei",
    "constrained": "qei-constrained",
    "ccbo": "qeicf-constrained",
}

#: When true, every surrogate fit asserts noiseless interpolation of its
#: training targets (1e-3 standardized). Enabled by the test suite; the env
#: var makes the flag reach benchmark worker processes.
DEBUG_CHECKS = os.environ.get("CCBO_DEBUG_CHECKS", "") == "1"


@dataclass(frozen=True)
class Observation:
    """One completed experiment: the point, the measured size, and its outcome."""

    point: DesignPoint
    size: float
    feasible: bool

    def __post_init__(self):
        if not (self.size >= 0 and math.isfinite(self.size)):
            raise DomainError(f"observed size must be finite and >= 0, got {self.size}")


@dataclass(frozen=True)
class CampaignState:
    space: DesignSpace
    target: float
    strategy: str
    observations: tuple[Observation, ...] = ()
    iteration: int = 0
    seed: int = 0
    include_infeasible_in_regret: bool = False
    # EI baseline scope: "all" measures improvement against every recorded
    # size (infeasible runs still carry one), so the acquisition never chases
    # values the surrogate has already seen; "feasible" restricts the baseline
    # to successful runs, mirroring the reported regret.
    incumbent_scope: str = "all"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise DomainError(f"unknown strategy {self.strategy!r}; choose from {STRATEGIES}")
        if not (0.0 < self.target <= 100.0):
            raise DomainError(f"target size must lie in (0, 100] um, got {self.target}")
        if self.incumbent_scope not in ("all", "feasible"):
            raise DomainError(f"incumbent_scope must be 'all' or 'feasible', got {self.incumbent_scope!r}")
        object.__setattr__(self, "observations", tuple(self.observations))

    def advanced(self, new_observations) -> "CampaignState":
        """New state with the given observations appended and the cycle counter bumped."""
        return replace(
            self,
            observations=self.observations + tuple(new_observations),
            iteration=self.iteration + 1,
        )


def _eligible(state: CampaignState):
    if state.include_infeasible_in_regret:
        return state.observations
    return tuple(o for o in state.observations if o.feasible)


def incumbent(state: CampaignState) -> tuple[float | None, Observation | None]:
    """Best objective value -(s - target)^2 among eligible observations."""
    best: Observation | None = None
    best_val = None
    for obs in _eligible(state):
        val = -((obs.size - state.target) ** 2)
        if best_val is None or val > best_val:
            best_val = val
            best = obs
    return best_val, best


def acquisition_baseline(state: CampaignState) -> float | None:
    """The g* handed to the acquisition, per the state's incumbent scope."""
    if state.incumbent_scope == "feasible":
        g_star, _ = incumbent(state)
        return g_star
    best_val = None
    for obs in state.observations:
        val = -((obs.size - state.target) ** 2)
        if best_val is None or val > best_val:
            best_val = val
    return best_val


def regret(state: CampaignState) -> float:
    """Closest eligible distance to the target; +inf when none exists."""
    g_star, _ = incumbent(state)
    if g_star is None:
        return math.inf
    return math.sqrt(-g_star)


def check_stopping(state: CampaignState, tolerance_fraction: float = 0.10) -> bool:
    if tolerance_fraction <= 0:
        raise DomainError("tolerance_fraction must be positive")
    return regret(state) <= tolerance_fraction * state.target


def derive_seed(*parts) -> int:
    """Stable 32-bit stream seed from campaign seed, iteration, and a role tag."""
    material = [
        zlib.crc32(p.encode()) if isinstance(p, str) else int(p) % (2**31) for p in parts
    ]
    return int(np.random.SeedSequence(material).generate_state(1)[0])


def _collapse_duplicates(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge encoded rows that coincide to ~1e-8, averaging their targets.

    A converged campaign re-visits its optimum; stacking coincident rows would
    force the noiseless fit to escalate its jitter and lose interpolation.
    """
    groups: dict[bytes, list[int]] = {}
    for i, row in enumerate(np.round(X, 8)):
        groups.setdefault(row.tobytes(), []).append(i)
    if len(groups) == len(X):
        return X, y
    idx = [members[0] for members in groups.values()]
    y_merged = np.array([float(np.mean(y[members])) for members in groups.values()])
    return X[idx], y_merged


def suggest(state: CampaignState, q: int = 2, mc_samples: int = 512) -> list[DesignPoint]:
    """Propose the next q experiments. Deterministic given (state, seed)."""
    if q < 1:
        raise DomainError("q must be >= 1")
    if state.strategy == "random":
        rng = np.random.default_rng(derive_seed(state.seed, state.iteration, "random"))
        return state.space.uniform_sample(q, rng)

    if len(state.observations) < 2:
        raise DomainError(
            f"strategy {state.strategy!r} needs at least 2 observations; "
            "generate an initial design first (sobol_sample)"
        )

    space = state.space
    X = space.encode_many([o.point for o in state.observations])
    sizes = np.array([o.size for o in state.observations])
    if state.strategy == "ccbo":
        y_raw = sizes
    else:
        y_raw = -((sizes - state.target) ** 2)
    X_fit, y_fit = _collapse_duplicates(X, y_raw)
    y_std, mu, scale = standardize(y_fit)

    gp = GPRegressor(
        n_continuous=space.n_continuous,
        random_state=derive_seed(state.seed, state.iteration, "gp"),
    ).fit(X_fit, y_std)
    if DEBUG_CHECKS:
        resid = np.max(np.abs(gp.predict(X_fit) - y_std))
        if resid > 1e-3:
            raise AssertionError(f"noiseless interpolation violated: {resid:.2e} > 1e-3")

    clf = None
    if state.strategy in ("constrained", "ccbo"):
        labels = np.where([o.feasible for o in state.observations], 1.0, -1.0)
        clf = VariationalProbitClassifier(
            n_continuous=space.n_continuous,
            random_state=derive_seed(state.seed, state.iteration, "classifier"),
        ).fit(X, labels)

    g_star = acquisition_baseline(state)
    config = AcquisitionConfig(
        mode=_ACQUISITION_MODE[state.strategy],
        mc_samples=mc_samples,
        q=q,
        target=state.target,
        incumbent=g_star if g_star is not None else NO_INCUMBENT,
        output_mean=mu,
        output_scale=scale,
    )
    proposal = optimize_acquisition(
        gp, clf, space, config, seed=derive_seed(state.seed, state.iteration, "acq")
    )
    return proposal.points

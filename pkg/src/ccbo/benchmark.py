"""Campaign benchmark harness: regret curves, AUC, feasibility counts, reports.

Each run evaluates one (target, strategy, repetition) triple: the starting
design is evaluated through the synthetic oracle, then `iterations` cycles of
suggest -> simulate -> record follow. Repetition r uses seed base_seed + r so
any single run is reproducible in isolation. The regret curve includes the
post-initialization point (index 0), so its AUC spans `iterations` unit
intervals; stretches without a feasible observation enter AUC arithmetic at a
configured cap (2x the maximum attainable size by default) that is recorded in
the exported summary.
"""

import concurrent.futures
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import DomainError
from .fixtures import load_fixture
from .simulator import SimConfig, max_attainable_size, run_experiment
from .space import default_space
from .stats import mann_whitney_u_one_tailed
from .strategy import STRATEGIES, CampaignState, Observation, regret, suggest


@dataclass
class BenchmarkConfig:
    targets: tuple[float, ...] = (0.6, 3.0, 6.0, 18.0)
    iterations: int = 10
    q: int = 2
    repetitions: int = 20
    strategies: tuple[str, ...] = STRATEGIES
    base_seed: int = 0
    start_fixture: str = "table2-start"
    mc_samples: int = 512
    sim: SimConfig = field(default_factory=SimConfig)
    regret_cap: float | None = None

    def __post_init__(self):
        if self.iterations < 1 or self.repetitions < 1:
            raise DomainError("iterations and repetitions must be >= 1")
        unknown = [s for s in self.strategies if s not in STRATEGIES]
        if unknown:
            raise DomainError(f"unknown strategies: {unknown}; choose from {STRATEGIES}")
        self.targets = tuple(float(t) for t in self.targets)
        self.strategies = tuple(self.strategies)
        if self.regret_cap is None:
            self.regret_cap = 2.0 * max_attainable_size(default_space(), self.sim)

    def to_dict(self) -> dict:
        return {
            "targets": list(self.targets),
            "iterations": self.iterations,
            "q": self.q,
            "repetitions": self.repetitions,
            "strategies": list(self.strategies),
            "base_seed": self.base_seed,
            "start_fixture": self.start_fixture,
            "mc_samples": self.mc_samples,
            "sim": self.sim.to_dict(),
            "regret_cap": self.regret_cap,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BenchmarkConfig":
        data = dict(data or {})
        if "sim" in data:
            data["sim"] = SimConfig.from_dict(data["sim"])
        known = {
            "targets",
            "iterations",
            "q",
            "repetitions",
            "strategies",
            "base_seed",
            "start_fixture",
            "mc_samples",
            "sim",
            "regret_cap",
        }
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown benchmark config fields: {sorted(unknown)}")
        if "targets" in data:
            data["targets"] = tuple(data["targets"])
        if "strategies" in data:
            data["strategies"] = tuple(data["strategies"])
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "BenchmarkConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(yaml.safe_load(fh))

    def content_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()


@dataclass
class RunResult:
    target: float
    strategy: str
    repetition: int
    seed: int
    regrets: list[float]
    n_feasible: int = 0
    n_infeasible: int = 0
    error: str | None = None


@dataclass
class BenchmarkResults:
    config: BenchmarkConfig
    runs: list[RunResult]

    def completed(self, target: float | None = None, strategy: str | None = None) -> list[RunResult]:
        out = []
        for run in self.runs:
            if run.error is not None:
                continue
            if target is not None and run.target != target:
                continue
            if strategy is not None and run.strategy != strategy:
                continue
            out.append(run)
        return out

    def auc_values(self, target: float, strategy: str) -> list[float]:
        cap = self.config.regret_cap
        return [auc_trapezoid(r.regrets, cap) for r in self.completed(target, strategy)]


def starting_observations(cfg: BenchmarkConfig) -> list[Observation]:
    """The starting design evaluated through the synthetic oracle."""
    rows = load_fixture(cfg.start_fixture)
    obs = []
    for row in rows:
        result = run_experiment(row.point, cfg.sim)
        obs.append(Observation(point=row.point, size=result.size, feasible=result.feasible))
    return obs


def run_single(cfg: BenchmarkConfig, target: float, strategy: str, repetition: int) -> RunResult:
    seed = cfg.base_seed + repetition
    result = RunResult(target=target, strategy=strategy, repetition=repetition, seed=seed, regrets=[])
    try:
        state = CampaignState(
            space=default_space(),
            target=target,
            strategy=strategy,
            observations=tuple(starting_observations(cfg)),
            seed=seed,
        )
        result.regrets.append(regret(state))
        for _ in range(cfg.iterations):
            points = suggest(state, q=cfg.q, mc_samples=cfg.mc_samples)
            new_obs = []
            for p in points:
                r = run_experiment(p, cfg.sim)
                new_obs.append(Observation(point=p, size=r.size, feasible=r.feasible))
                if r.feasible:
                    result.n_feasible += 1
                else:
                    result.n_infeasible += 1
            state = state.advanced(new_obs)
            result.regrets.append(regret(state))
    except Exception as exc:  # a failed repetition must not sink the benchmark
        result.error = f"{type(exc).__name__}: {exc}"
    return result


def _run_job(args) -> RunResult:
    cfg_dict, target, strategy, repetition = args
    return run_single(BenchmarkConfig.from_dict(cfg_dict), target, strategy, repetition)


def run_benchmark(cfg: BenchmarkConfig, parallelism: int | None = None, progress=None) -> BenchmarkResults:
    jobs = [
        (cfg.to_dict(), target, strategy, rep)
        for target in cfg.targets
        for strategy in cfg.strategies
        for rep in range(cfg.repetitions)
    ]
    runs: list[RunResult] = []
    if parallelism is None or parallelism > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=parallelism) as pool:
            for run in pool.map(_run_job, jobs):
                runs.append(run)
                if progress:
                    progress(run)
    else:
        for job in jobs:
            run = _run_job(job)
            runs.append(run)
            if progress:
                progress(run)
    runs.sort(key=lambda r: (r.target, r.strategy, r.repetition))
    return BenchmarkResults(config=cfg, runs=runs)


def auc_trapezoid(curve, sentinel_cap: float | None = None) -> float:
    """Trapezoid area under a regret curve sampled at unit iteration spacing."""
    values = list(curve)
    if not values:
        raise DomainError("AUC of an empty regret curve is undefined")
    capped = []
    for v in values:
        if math.isinf(v):
            if sentinel_cap is None:
                raise DomainError("curve contains no-feasible sentinels; a cap is required")
            capped.append(float(sentinel_cap))
        else:
            capped.append(float(v))
    if len(capped) == 1:
        return 0.0
    return float(sum((a + b) / 2.0 for a, b in zip(capped, capped[1:])))


# -- exports ---------------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def export_results(results: BenchmarkResults, destination) -> list[Path]:
    """Write regret curves, AUC summary, p-values, and counts; returns the paths."""
    dest = Path(destination)
    dest.mkdir(parents=True, exist_ok=True)
    cfg = results.config
    cap = cfg.regret_cap

    curves = io.StringIO()
    curves.write("target,strategy,repetition,iteration,regret\n")
    for run in results.runs:
        if run.error is not None:
            continue
        for it, r in enumerate(run.regrets):
            r_out = cap if math.isinf(r) else r
            curves.write(f"{_fmt(run.target)},{run.strategy},{run.repetition},{it},{_fmt(r_out)}\n")

    auc = io.StringIO()
    auc.write("target,strategy,auc_mean,auc_sd,n\n")
    auc_table: dict[str, dict[str, dict]] = {}
    for target in cfg.targets:
        for strategy in cfg.strategies:
            vals = results.auc_values(target, strategy)
            if not vals:
                continue
            mean = float(np.mean(vals))
            sd = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
            auc.write(f"{_fmt(target)},{strategy},{_fmt(mean)},{_fmt(sd)},{len(vals)}\n")
            auc_table.setdefault(_fmt(target), {})[strategy] = {
                "mean": mean,
                "sd": sd,
                "n": len(vals),
                "pretty": f"{mean:.2f} ± {sd:.2f}",
            }

    pvals = io.StringIO()
    pvals.write("target,baseline,p_value\n")
    p_table: dict[str, dict[str, float]] = {}
    if "ccbo" in cfg.strategies:
        for target in cfg.targets:
            ccbo_vals = results.auc_values(target, "ccbo")
            for strategy in cfg.strategies:
                if strategy == "ccbo" or not ccbo_vals:
                    continue
                other = results.auc_values(target, strategy)
                if not other:
                    continue
                _, p = mann_whitney_u_one_tailed(ccbo_vals, other, alternative="a_less")
                pvals.write(f"{_fmt(target)},{strategy},{_fmt(p)}\n")
                p_table.setdefault(_fmt(target), {})[strategy] = p

    counts = io.StringIO()
    counts.write("target,strategy,repetition,feasible,infeasible\n")
    for run in results.runs:
        if run.error is not None:
            continue
        counts.write(
            f"{_fmt(run.target)},{run.strategy},{run.repetition},{run.n_feasible},{run.n_infeasible}\n"
        )

    summary = {
        "config": cfg.to_dict(),
        "config_sha256": cfg.content_hash(),
        "regret_cap": cap,
        "auc": auc_table,
        "p_values_ccbo_less_than": p_table,
        "failures": [
            {"target": r.target, "strategy": r.strategy, "repetition": r.repetition, "error": r.error}
            for r in results.runs
            if r.error is not None
        ],
    }

    paths = []
    for name, text in (
        ("regret_curves.csv", curves.getvalue()),
        ("auc_summary.csv", auc.getvalue()),
        ("pvalues.csv", pvals.getvalue()),
        ("feasibility_counts.csv", counts.getvalue()),
        ("summary.json", json.dumps(summary, sort_keys=True, indent=2) + "\n"),
    ):
        path = dest / name
        path.write_text(text, encoding="utf-8")
        paths.append(path)
    return paths

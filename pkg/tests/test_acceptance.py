"""Acceptance gate: every primary criterion at its stated tolerance.

Each test prints one PASS line with the measured numbers. The two benchmark
fixtures are shared across criteria 1-3 and 6; they run the real pipeline at
the default settings (q=2, N=512, 20 repetitions, 10/5 iterations,
five-point starting design). The UI round-trip criterion lives in the
frontend's own test suite; everything here runs without it.
"""

import json
import math
import os
import signal
import socket
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.stats import norm

import ccbo.strategy
from ccbo.acquisition import normal_base_samples, qei, qei_cf
from ccbo.benchmark import BenchmarkConfig, run_benchmark
from ccbo.classifier import VariationalProbitClassifier, probit_probability
from ccbo.gp import GPRegressor
from ccbo.simulator import feasible, particle_size
from ccbo.space import DesignPoint, default_space, standardize
from ccbo.stats import mann_whitney_u_one_tailed
from ccbo.strategy import CampaignState, Observation, check_stopping

from test_acquisition import analytic_ei, quadrature_qeicf
from test_stats import brute_force_exact_p

REPETITIONS = 20
PARALLELISM = min(4, os.cpu_count() or 1)


def _report(criterion: str, detail: str):
    print(f"\nACCEPTANCE PASS [{criterion}]: {detail}")


@pytest.fixture(scope="session")
def main_benchmark():
    cfg = BenchmarkConfig(
        targets=(18.0,),
        iterations=10,
        q=2,
        repetitions=REPETITIONS,
        strategies=("random", "vanilla", "constrained", "ccbo"),
        base_seed=0,
    )
    t0 = time.monotonic()
    results = run_benchmark(cfg, parallelism=PARALLELISM)
    wall = time.monotonic() - t0
    return results, wall


@pytest.fixture(scope="session")
def multi_target_ccbo():
    cfg = BenchmarkConfig(
        targets=(0.6, 3.0, 6.0),
        iterations=5,
        q=2,
        repetitions=REPETITIONS,
        strategies=("ccbo",),
        base_seed=0,
    )
    return run_benchmark(cfg, parallelism=PARALLELISM)


def test_criterion_01_strategy_ordering_and_runtime(main_benchmark):
    results, wall = main_benchmark
    failures = [r for r in results.runs if r.error]
    assert not failures, failures
    means = {}
    for strategy in results.config.strategies:
        vals = results.auc_values(18.0, strategy)
        assert len(vals) == REPETITIONS
        means[strategy] = float(np.mean(vals))
    ccbo_vals = results.auc_values(18.0, "ccbo")
    pvals = {}
    for baseline in ("random", "vanilla", "constrained"):
        assert means["ccbo"] < means[baseline]
        _, p = mann_whitney_u_one_tailed(ccbo_vals, results.auc_values(18.0, baseline))
        assert p < 0.01, (baseline, p)
        pvals[baseline] = p
    assert wall <= 30 * 60, f"benchmark took {wall:.0f}s"
    _report(
        "1: strategy ordering",
        f"AUC means {({k: round(v, 2) for k, v in means.items()})}, "
        f"p-values {({k: f'{v:.2e}' for k, v in pvals.items()})}, "
        f"runtime {wall:.0f}s on {os.cpu_count()} cores",
    )


def test_criterion_02_fast_convergence(main_benchmark, multi_target_ccbo):
    results18, _ = main_benchmark
    medians = {}
    med18 = float(np.median([r.regrets[5] for r in results18.completed(18.0, "ccbo")]))
    assert med18 <= 0.05 * 18.0, med18
    medians[18.0] = med18
    for target in (0.6, 3.0, 6.0):
        med = float(np.median([r.regrets[5] for r in multi_target_ccbo.completed(target, "ccbo")]))
        assert med <= 0.05 * target, (target, med)
        medians[target] = med
    _report(
        "2: fast convergence",
        "median regret@5 " + ", ".join(f"{t}um: {m:.4f} (<= {0.05 * t:.3f})" for t, m in sorted(medians.items())),
    )


def test_criterion_03_feasibility_benefit(main_benchmark):
    results, _ = main_benchmark
    counts = {
        s: [r.n_infeasible for r in results.completed(18.0, s)]
        for s in ("random", "vanilla", "constrained", "ccbo")
    }
    pvals = {}
    for constrained in ("constrained", "ccbo"):
        for baseline in ("vanilla", "random"):
            assert np.mean(counts[constrained]) < np.mean(counts[baseline])
            _, p = mann_whitney_u_one_tailed(counts[constrained], counts[baseline])
            assert p < 0.05, (constrained, baseline, p)
            pvals[f"{constrained}<{baseline}"] = p
    _report(
        "3: feasibility benefit",
        f"mean infeasible {({k: round(float(np.mean(v)), 2) for k, v in counts.items()})}, "
        f"p-values {({k: f'{v:.1e}' for k, v in pvals.items()})}",
    )


def test_criterion_04_qei_oracle_equivalence():
    rng = np.random.default_rng(2025)
    failures = 0
    for _ in range(20):
        mu = float(rng.uniform(-2, 2))
        sigma = float(rng.uniform(0.2, 2.0))
        best = float(rng.uniform(-2, 2))
        oracle = analytic_ei(mu, sigma, best)
        estimates = [
            qei(mu + sigma * rng.standard_normal((512, 1)), best) for _ in range(50)
        ]
        se = float(np.std(estimates, ddof=1)) / math.sqrt(50)
        if abs(float(np.mean(estimates)) - oracle) > 3 * se:
            failures += 1
    assert failures <= 2, failures
    _report("4: qEI oracle equivalence", f"{failures}/20 outside 3 MC standard errors (allowed 2)")


def test_criterion_05_qeicf_oracle_equivalence():
    rng = np.random.default_rng(77)
    worst = 0.0
    for i in range(20):
        mu = float(rng.uniform(0.0, 6.0))
        sigma = float(rng.uniform(0.1, 1.5))
        target = float(rng.uniform(0.0, 6.0))
        g_star = -float(rng.uniform(0.1, 9.0))
        oracle = quadrature_qeicf(mu, sigma, target, g_star)
        draws = mu + sigma * normal_base_samples(2**16, 1, seed=1000 + i)
        estimate = qei_cf(draws, target=target, incumbent=g_star)
        err = abs(estimate - oracle)
        ok = err <= max(0.02 * abs(oracle), 1e-4)
        assert ok, (mu, sigma, target, g_star, oracle, estimate)
        worst = max(worst, err / max(abs(oracle), 1e-12))
    _report("5: qEICF oracle equivalence", f"20/20 within 2% of adaptive quadrature (worst rel err {worst:.2e})")


def test_criterion_06_gp_interpolation(main_benchmark):
    # interpolation is asserted inside every surrogate fit when the debug flag
    # is on (conftest enables it before the benchmark fixtures run); a violation
    # raises and surfaces as a failed repetition in criterion 1.
    results, _ = main_benchmark
    assert ccbo.strategy.DEBUG_CHECKS
    assert os.environ.get("CCBO_DEBUG_CHECKS") == "1"
    assert not [r for r in results.runs if r.error]
    # direct spot check on a benchmark-sized fit
    space = default_space()
    rng = np.random.default_rng(9)
    pts = space.sobol_sample(25, seed=2)
    X = space.encode_many(pts)
    sizes = np.array([particle_size(p) for p in pts])
    y, _, _ = standardize(sizes)
    gp = GPRegressor(n_continuous=space.n_continuous, random_state=int(rng.integers(1 << 30))).fit(X, y)
    resid = float(np.max(np.abs(gp.predict(X) - y)))
    assert resid <= 1e-3, resid
    _report("6: GP interpolation", f"max |posterior mean - target| = {resid:.2e} (<= 1e-3), benchmark self-checks on")


def test_criterion_07_classifier_sanity():
    assert probit_probability(0.0, 123.0) == 0.5
    phi1 = probit_probability(1.0, 0.0)
    assert phi1 == pytest.approx(0.8413, abs=5e-5)
    rng = np.random.default_rng(0)
    x = np.concatenate([rng.uniform(0.0, 0.4, 10), rng.uniform(0.6, 1.0, 10)])
    X = np.hstack([x[:, None], np.zeros((20, 1))])
    labels = np.concatenate([-np.ones(10), np.ones(10)])
    clf = VariationalProbitClassifier(n_continuous=1, random_state=0).fit(X, labels)
    p_low, p_high = clf.prob_feasible(np.array([[0.05, 0.0], [0.95, 0.0]]))
    assert p_low < 0.1 and p_high > 0.9
    _report(
        "7: classifier sanity",
        f"P(mu=0)=0.5 exact, Phi(1)={phi1:.5f}, separable deep-side probs ({p_low:.3f}, {p_high:.3f})",
    )


def test_criterion_08_statistics_kernel():
    rng = np.random.default_rng(11)
    checked = 0
    for n1 in range(1, 7):
        for n2 in range(1, 7):
            pooled = rng.permutation(np.arange(1, n1 + n2 + 1) * 0.731)
            a, b = pooled[:n1], pooled[n1:]
            _, p = mann_whitney_u_one_tailed(a, b)
            assert p == pytest.approx(brute_force_exact_p(a, b), abs=1e-12)
            checked += 1
    from ccbo.benchmark import auc_trapezoid

    assert auc_trapezoid([4.0, 2.0, 0.0]) == pytest.approx(4.0)
    assert auc_trapezoid([2.0] * 11) == pytest.approx(20.0)
    _report("8: statistics kernel", f"exact Mann-Whitney matches enumeration for {checked} size pairs; AUC hand values ok")


def test_criterion_09_simulator_spot_values():
    pt = DesignPoint({"concentration": 3.62, "flow_rate": 30.0, "voltage": 18.0, "solvent": "CHCl3"})
    size = particle_size(pt)
    assert size == pytest.approx(18.00, abs=0.01)
    base = {"concentration": 2.0, "flow_rate": 5.0, "voltage": 14.0}
    offset = particle_size(DesignPoint({**base, "solvent": "CHCl3"})) - particle_size(
        DesignPoint({**base, "solvent": "DMAc"})
    )
    assert offset == pytest.approx(1.0, abs=1e-12)
    for q, sol, expect in [
        (math.exp(-1.4) * 1.000001, "CHCl3", True),
        (math.exp(-1.4) * 0.999999, "CHCl3", False),
        (math.exp(1.4) * 0.999999, "DMAc", True),
        (math.exp(1.4) * 1.000001, "DMAc", False),
    ]:
        assert feasible(DesignPoint({**base, "flow_rate": q, "solvent": sol})) is expect
    _report(
        "9: simulator spot values",
        f"size(3.62, 30, 18, CHCl3)={size:.4f}, solvent offset exactly 1.0, thresholds at e^(+/-1.4)",
    )


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def _wait_healthy(client, base, deadline=30.0):
    t0 = time.monotonic()
    while time.monotonic() - t0 < deadline:
        try:
            if client.get(base + "/healthz").status_code == 200:
                return True
        except Exception:
            time.sleep(0.2)
    return False


def test_criterion_10_service_durability(tmp_path):
    import httpx

    data_dir = tmp_path / "campaigns"
    port = _free_port()
    cmd = [
        sys.executable, "-m", "ccbo.cli", "serve",
        "--port", str(port), "--data-dir", str(data_dir), "--mc-samples", "128",
    ]
    base = f"http://127.0.0.1:{port}"
    proc = subprocess.Popen(cmd, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    try:
        with httpx.Client(timeout=10.0) as client:
            assert _wait_healthy(client, base)
            cid = client.post(
                base + "/campaigns", json={"target": 3.0, "strategy": "random", "seed": 3}
            ).json()["id"]
            client.post(base + f"/campaigns/{cid}/initialize", json={"n": 4, "seed": 1})
            pending = client.get(base + f"/campaigns/{cid}").json()["pending_points"]
            client.post(
                base + f"/campaigns/{cid}/observations",
                json={"point": pending[0], "size": 4.5, "feasible": True},
            )
            client.post(
                base + f"/campaigns/{cid}/observations",
                json={"point": pending[1], "size": 1.0, "feasible": False},
            )
            client.post(base + f"/campaigns/{cid}/suggest?q=2")
            before = client.get(base + f"/campaigns/{cid}").json()
        proc.send_signal(signal.SIGKILL)
        proc.wait(timeout=10)

        port2 = _free_port()
        cmd2 = [
            sys.executable, "-m", "ccbo.cli", "serve",
            "--port", str(port2), "--data-dir", str(data_dir), "--mc-samples", "128",
        ]
        base2 = f"http://127.0.0.1:{port2}"
        proc2 = subprocess.Popen(cmd2, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
        try:
            with httpx.Client(timeout=10.0) as client:
                assert _wait_healthy(client, base2)
                after = client.get(base2 + f"/campaigns/{cid}").json()
            assert after == before
        finally:
            proc2.terminate()
            proc2.wait(timeout=10)
    finally:
        if proc.poll() is None:
            proc.kill()
    _report("10: service durability", f"replayed state identical across SIGKILL restart ({len(before)} fields)")


def test_criterion_11_stopping_rule(space):
    obs = Observation(
        point=space.point(concentration=4.02, flow_rate=1.08, voltage=16.3, solvent="CHCl3"),
        size=3.29,
        feasible=True,
    )
    state = CampaignState(space=space, target=3.0, strategy="ccbo", observations=(obs,), seed=0)
    assert check_stopping(state, 0.10) is True
    worse = CampaignState(
        space=space,
        target=3.0,
        strategy="ccbo",
        observations=(Observation(point=obs.point, size=3.5, feasible=True),),
        seed=0,
    )
    assert check_stopping(worse, 0.10) is False
    _report("11: stopping rule", "feasible 3.29 vs target 3.0 stops at the 10% tolerance; 3.5 does not")

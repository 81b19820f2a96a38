"""Command-line front door.

Exit codes: 0 success, 1 runtime failure, 2 usage/validation problems. All
tabular data on stdout uses the shared CSV schema; diagnostics go to stderr.
"""

import sys

import click
import yaml

from . import benchmark as bench_mod
from .errors import CcboError, DomainError, UnknownFixtureError
from .fixtures import FixtureRow, fixture_names, load_fixture, parse_history_csv, rows_to_csv
from .simulator import SimConfig, run_experiment
from .space import DesignSpace, default_space
from .strategy import CampaignState, Observation, suggest


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_sim_config(path, size_log_base, feas_log_base, size_offset, feas_offset) -> SimConfig:
    data = {}
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    cfg = SimConfig.from_dict(data)
    if size_log_base is not None:
        cfg.size_log_base = size_log_base
    if feas_log_base is not None:
        cfg.feas_log_base = feas_log_base
    if size_offset is not None:
        cfg.size_offset = size_offset
    if feas_offset is not None:
        cfg.feas_offset = feas_offset
    return SimConfig.from_dict(cfg.to_dict())


@click.group()
def main():
    """Constrained composite Bayesian optimization toolkit."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Benchmark config file (YAML). Defaults reproduce the full 4x4 run.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="bench-out", show_default=True)
@click.option("--seed", type=int, default=None, help="Override the base seed.")
@click.option("--repetitions", type=int, default=None, help="Override the repetition count.")
@click.option("--iterations", type=int, default=None)
@click.option("--parallelism", type=int, default=None, help="Worker processes (default: all cores).")
def bench(config_path, out_dir, seed, repetitions, iterations, parallelism):
    """Run the benchmark campaigns and export CSV/JSON reports."""
    try:
        cfg = bench_mod.BenchmarkConfig.from_file(config_path) if config_path else bench_mod.BenchmarkConfig()
        if seed is not None:
            cfg.base_seed = seed
        if repetitions is not None:
            cfg.repetitions = repetitions
        if iterations is not None:
            cfg.iterations = iterations
        cfg = bench_mod.BenchmarkConfig.from_dict(cfg.to_dict())
    except (DomainError, yaml.YAMLError, OSError) as exc:
        _fail(str(exc), 2)

    total = len(cfg.targets) * len(cfg.strategies) * cfg.repetitions
    done = {"n": 0}

    def progress(run):
        done["n"] += 1
        status = "FAILED: " + run.error if run.error else "ok"
        click.echo(
            f"[{done['n']}/{total}] target={run.target} strategy={run.strategy} "
            f"rep={run.repetition} {status}",
            err=True,
        )

    try:
        results = bench_mod.run_benchmark(cfg, parallelism=parallelism, progress=progress)
        paths = bench_mod.export_results(results, out_dir)
    except CcboError as exc:
        _fail(str(exc), 1)
    failures = [r for r in results.runs if r.error]
    for path in paths:
        click.echo(str(path))
    if failures:
        _fail(f"{len(failures)} of {total} repetitions failed (see summary.json)", 1)


@main.command()
@click.option("-c", "--concentration", type=float, required=True, help="Polymer concentration (% w/v).")
@click.option("-q", "--flow-rate", type=float, required=True, help="Flow rate (uL/min).")
@click.option("-u", "--voltage", type=float, required=True, help="Voltage (kV).")
@click.option("-s", "--solvent", type=str, required=True)
@click.option("--sim-config", "sim_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--size-log-base", type=float, default=None)
@click.option("--feas-log-base", type=float, default=None)
@click.option("--size-offset", type=float, default=None)
@click.option("--feas-offset", type=float, default=None)
def simulate(concentration, flow_rate, voltage, solvent, sim_path, size_log_base, feas_log_base,
             size_offset, feas_offset):
    """Query the synthetic oracle for one parameter set."""
    try:
        cfg = _load_sim_config(sim_path, size_log_base, feas_log_base, size_offset, feas_offset)
        space = default_space()
        point = space.point(
            concentration=concentration, flow_rate=flow_rate, voltage=voltage, solvent=solvent
        )
        result = run_experiment(point, cfg, space=space)
    except DomainError as exc:
        _fail(str(exc), 2)
    except CcboError as exc:
        _fail(str(exc), 1)
    click.echo(f"size_um={result.size:.4f}")
    click.echo(f"feasible={'yes' if result.feasible else 'no'}")
    click.echo("config=" + yaml.safe_dump(cfg.to_dict(), default_flow_style=True).strip())


@main.command()
@click.option("-n", "--count", "n", type=int, default=8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--space", "space_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Design-space definition file (YAML); bundled electrospray space by default.")
def init(n, seed, space_path):
    """Print a quasi-random (Sobol) initial design as CSV."""
    try:
        space = DesignSpace.from_file(space_path) if space_path else default_space()
        points = space.sobol_sample(n, seed=seed)
    except DomainError as exc:
        _fail(str(exc), 2)
    rows = [FixtureRow(label=f"init-{i+1}", point=p) for i, p in enumerate(points)]
    click.echo(rows_to_csv(rows), nl=False)


@main.command("suggest")
@click.option("--history", "history_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Observations CSV (shared schema; size and feasible required).")
@click.option("--target", type=float, required=True, help="Target size (um).")
@click.option("--strategy", type=click.Choice(["random", "vanilla", "constrained", "ccbo"]),
              default="ccbo", show_default=True)
@click.option("-q", "--batch", "q", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--mc-samples", type=int, default=512, show_default=True)
def suggest_cmd(history_path, target, strategy, q, seed, mc_samples):
    """Suggest the next experiments from a history CSV (stateless)."""
    try:
        with open(history_path, "r", encoding="utf-8") as fh:
            rows = parse_history_csv(fh.read(), require_outcomes=True)
        space = default_space()
        observations = []
        for row in rows:
            space.validate_point(row.point)
            observations.append(Observation(point=row.point, size=row.size, feasible=row.feasible))
        state = CampaignState(
            space=space,
            target=target,
            strategy=strategy,
            observations=tuple(observations),
            seed=seed,
        )
        points = suggest(state, q=q, mc_samples=mc_samples)
    except DomainError as exc:
        _fail(str(exc), 2)
    except CcboError as exc:
        _fail(str(exc), 1)
    out = [FixtureRow(label=f"next-{i+1}", point=p) for i, p in enumerate(points)]
    click.echo(rows_to_csv(out), nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8787, show_default=True)
@click.option("--data-dir", type=click.Path(file_okay=False), default=None,
              help="Campaign event-log directory (env CCBO_DATA_DIR, default ./ccbo-data).")
@click.option("--default-q", type=int, default=2, show_default=True,
              help="Batch size used when /suggest is called without ?q=.")
@click.option("--mc-samples", type=int, default=512, show_default=True)
@click.option("--static-dir", type=click.Path(file_okay=False), default=None,
              help="Directory with the built web UI (served at /).")
def serve(host, port, data_dir, default_q, mc_samples, static_dir):
    """Run the campaign service until interrupted."""
    import uvicorn

    from .service import create_app

    app = create_app(
        data_dir=data_dir, mc_samples=mc_samples, default_q=default_q, static_dir=static_dir
    )
    try:
        uvicorn.run(app, host=host, port=port, log_level="info")
    except OSError as exc:  # busy port and friends
        _fail(str(exc), 1)


@main.command()
@click.argument("name", required=False)
def fixtures(name):
    """Print a bundled dataset as CSV, or list the available names."""
    if name is None:
        for n in fixture_names():
            click.echo(n)
        return
    try:
        rows = load_fixture(name)
    except UnknownFixtureError as exc:
        _fail(str(exc.args[0]), 2)
    click.echo(rows_to_csv(rows), nl=False)


if __name__ == "__main__":
    main()

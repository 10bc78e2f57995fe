"""Command-line interface: bench runs, demo tools, teleop server."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from kinder.bench import (
    RunSpec,
    read_results,
    render_table,
    run_matrix,
    write_episodes_jsonl,
    write_results,
)


@click.group()
def main() -> None:
    """2D kinematic manipulation environments and planning baselines."""


@main.group()
def bench() -> None:
    """Evaluation harness."""


@bench.command("run")
@click.option("--baseline", type=click.Choice(["bp", "mpc", "llm", "llm-con", "random"]), required=True)
@click.option("--variant", required=True)
@click.option("--seeds", default=5, show_default=True)
@click.option("--episodes", default=50, show_default=True)
@click.option("--max-steps", default=500, show_default=True)
@click.option("--obs-noise", default=0.0, show_default=True)
@click.option("--act-noise", default=0.0, show_default=True)
@click.option("--base-seed", default=0, show_default=True)
@click.option("--cassette", default=None, help="JSONL cassette for llm baselines")
@click.option("--out", "out_path", default="results.csv", show_default=True)
@click.option("--jsonl", "jsonl_path", default=None, help="optional per-episode JSONL")
@click.option("--workers", default=1, show_default=True)
def bench_run(baseline, variant, seeds, episodes, max_steps, obs_noise,
              act_noise, base_seed, cassette, out_path, jsonl_path, workers):
    """Run one (baseline, variant) cell of the evaluation matrix."""
    spec = RunSpec(
        baseline=baseline, variant=variant, num_seeds=seeds,
        episodes_per_seed=episodes, max_steps=max_steps,
        obs_noise=obs_noise, act_noise=act_noise, base_seed=base_seed,
        cassette=cassette,
    )

    def progress(result):
        status = "ok" if result.success else (result.failure_kind or "fail")
        click.echo(
            f"seed {result.seed} episode {result.episode}: {status} "
            f"steps={result.steps} inf={result.inf_time_s:.3f}s"
        )

    results = run_matrix([spec], workers=workers, progress=progress)
    write_results(results, out_path)
    if jsonl_path:
        write_episodes_jsonl(results, jsonl_path)
    click.echo(f"wrote {len(results)} episodes to {out_path}")
    click.echo(render_table(results))


@bench.command("table")
@click.option("--in", "in_path", required=True)
def bench_table(in_path):
    """Render a results CSV as a metrics grid."""
    results = read_results(in_path)
    click.echo(render_table(results))


@main.group()
def demo() -> None:
    """Demonstration tools."""


@demo.command("verify")
@click.argument("paths", nargs=-1, type=click.Path(exists=True))
def demo_verify(paths):
    """Replay demo files and verify their stored outcomes."""
    from kinder.demos import read_demo, replay, VerificationMismatch, UnknownSchema

    failures = 0
    for path in paths:
        try:
            _, success = replay(read_demo(path))
            click.echo(f"{path}: ok (success={success})")
        except (VerificationMismatch, UnknownSchema) as err:
            click.echo(f"{path}: FAILED ({err})")
            failures += 1
    if failures:
        sys.exit(1)


@demo.command("generate")
@click.option("--baseline", type=click.Choice(["bp"]), default="bp", show_default=True)
@click.option("--variant", required=True)
@click.option("-n", "count", default=100, show_default=True)
@click.option("--base-seed", default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
def demo_generate(baseline, variant, count, base_seed, out_dir):
    """Generate planner demonstrations for a variant."""
    from kinder.baselines import bilevel_solve
    from kinder.demos import dataset_paths, generate_dataset, write_demo

    def planner(env, state, seed):
        actions, _ = bilevel_solve(env, state, seed=seed)
        return actions

    demos, stats = generate_dataset(planner, variant, count, base_seed)
    for demo_record, path in zip(demos, dataset_paths(out_dir, demos)):
        write_demo(demo_record, path)
    click.echo(
        f"{stats.successes}/{stats.attempts} episodes succeeded; "
        f"wrote {len(demos)} demos to {out_dir}"
    )


@main.group()
def teleop() -> None:
    """Teleoperation server."""


@teleop.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8753, show_default=True)
@click.option("--static-dir", default=None, type=click.Path())
@click.option("--tick-rate", default=20.0, show_default=True)
@click.option("--demo-dir", default=".", show_default=True)
def teleop_serve(host, port, static_dir, tick_rate, demo_dir):
    """Serve live teleoperation sessions over a websocket."""
    from kinder import teleopd

    click.echo(f"teleop server on ws://{host}:{port} (tick {tick_rate} Hz)")
    if static_dir:
        click.echo(f"serving static files from {Path(static_dir).resolve()}")
    teleopd.run(host=host, port=port, static_dir=static_dir,
                tick_rate=tick_rate, demo_dir=demo_dir)


if __name__ == "__main__":
    main()

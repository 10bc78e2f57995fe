"""Evaluation harness: run matrices, metrics, and machine-readable output."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from kinder.baselines import (
    BilevelConfig,
    CassetteTransport,
    MpcConfig,
    bilevel_solve,
    llm_solve,
)
from kinder.baselines.mpc import MpcController
from kinder.bench.noise import NoisyEnv, _fnv64
from kinder.envcore import ActionDelta
from kinder.suite2d import make_env

BASELINES = ("bp", "mpc", "llm", "llm-con", "random")


@dataclass(frozen=True)
class RunSpec:
    """One cell of the evaluation matrix."""

    baseline: str
    variant: str
    num_seeds: int = 5
    episodes_per_seed: int = 50
    max_steps: int = 500
    obs_noise: float = 0.0
    act_noise: float = 0.0
    base_seed: int = 0
    cassette: str | None = None

    def __post_init__(self) -> None:
        assert self.baseline in BASELINES
        assert self.num_seeds > 0 and self.episodes_per_seed > 0
        assert self.obs_noise >= 0 and self.act_noise >= 0


@dataclass(frozen=True)
class EpisodeResult:
    baseline: str
    variant: str
    seed: int
    episode: int
    success: bool
    steps: int
    reward: float
    inf_time_s: float
    failure_kind: str = ""


@dataclass(frozen=True)
class MetricRow:
    """Aggregated metrics in the style of the main results table."""

    baseline: str
    variant: str
    sr: float
    sr_std: float
    rwd: float | None
    rwd_std: float | None
    inf_time: float
    inf_time_std: float
    episodes: int


def episode_seed(base_seed: int, seed_index: int, episode_index: int) -> int:
    """Deterministic per-episode seed from the matrix coordinates."""
    return _fnv64(base_seed, seed_index, episode_index)


def fnv64(*values: int) -> int:
    return _fnv64(*values)


def _make_wrapped(spec: RunSpec) -> NoisyEnv:
    env = make_env(spec.variant)
    return NoisyEnv(env, obs_sigma=spec.obs_noise, act_sigma=spec.act_noise)


def _replay(wrapped: NoisyEnv, actions: list[ActionDelta], max_steps: int) -> tuple[bool, int]:
    steps = 0
    for action in actions[:max_steps]:
        out = wrapped.step(action)
        steps += 1
        if out.terminated:
            return True, steps
    return False, steps


def run_episode(
    spec: RunSpec,
    seed_index: int,
    episode_index: int,
    clock: Callable[[], float] = time.monotonic,
) -> EpisodeResult:
    """Run one evaluated episode; planner exceptions count as failures."""
    ep_seed = episode_seed(spec.base_seed, seed_index, episode_index)
    wrapped = _make_wrapped(spec)
    failure_kind = ""
    inf_time = 0.0
    success = False
    steps = 0
    try:
        obs = wrapped.reset(ep_seed)
        if spec.baseline == "bp":
            planning_env = make_env(spec.variant)
            planning_env.set_state(obs)
            t0 = clock()
            actions, _ = bilevel_solve(planning_env, obs, BilevelConfig(), seed=ep_seed)
            inf_time = clock() - t0
            if actions is None:
                failure_kind = "planning"
            else:
                success, steps = _replay(wrapped, actions, spec.max_steps)
        elif spec.baseline in ("llm", "llm-con"):
            planning_env = make_env(spec.variant)
            planning_env.set_state(obs)
            transport = CassetteTransport(spec.cassette) if spec.cassette else None
            if transport is None:
                from kinder.baselines import HttpChatTransport

                transport = HttpChatTransport()
            mode = "in_context" if spec.baseline == "llm-con" else "zero_shot"
            t0 = clock()
            actions, _ = llm_solve(planning_env, obs, transport, mode, seed=ep_seed)
            inf_time = clock() - t0
            if actions is None:
                failure_kind = "planning"
            else:
                success, steps = _replay(wrapped, actions, spec.max_steps)
        elif spec.baseline == "mpc":
            cfg = MpcConfig()
            model_env = make_env(spec.variant)
            rng = np.random.default_rng(np.uint64(_fnv64(ep_seed, 0x6D7063)))
            controller = MpcController(cfg, rng)
            state = obs
            for _ in range(spec.max_steps):
                t0 = clock()
                action = controller.act(model_env, state)
                inf_time += clock() - t0
                out = wrapped.step(action)
                steps += 1
                state = out.state
                if out.terminated:
                    success = True
                    break
        elif spec.baseline == "random":
            rng = np.random.default_rng(np.uint64(ep_seed))
            for _ in range(spec.max_steps):
                out = wrapped.step(ActionDelta.from_array(rng.uniform(-1, 1, 5)))
                steps += 1
                if out.terminated:
                    success = True
                    break
    except Exception as err:  # noqa: BLE001 - failures must not abort a matrix
        failure_kind = f"exception:{type(err).__name__}"
    if not success and not failure_kind:
        failure_kind = "timeout"
    return EpisodeResult(
        baseline=spec.baseline,
        variant=spec.variant,
        seed=seed_index,
        episode=episode_index,
        success=success,
        steps=steps,
        reward=-float(steps),
        inf_time_s=inf_time,
        failure_kind=failure_kind if not success else "",
    )


def _episode_job(args: tuple) -> EpisodeResult:
    spec_dict, seed_index, episode_index = args
    return run_episode(RunSpec(**spec_dict), seed_index, episode_index)


def run_matrix(
    specs: list[RunSpec],
    workers: int = 1,
    clock: Callable[[], float] = time.monotonic,
    progress: Callable[[EpisodeResult], None] | None = None,
) -> list[EpisodeResult]:
    """Run every episode of every spec; identical spec, identical table."""
    jobs = [
        (spec, s, e)
        for spec in specs
        for s in range(spec.num_seeds)
        for e in range(spec.episodes_per_seed)
    ]
    results: list[EpisodeResult] = []
    if workers <= 1:
        for spec, s, e in jobs:
            result = run_episode(spec, s, e, clock)
            results.append(result)
            if progress is not None:
                progress(result)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            payload = [(spec.__dict__, s, e) for spec, s, e in jobs]
            for result in pool.map(_episode_job, payload):
                results.append(result)
                if progress is not None:
                    progress(result)
        # Merge order is already (spec, seed, episode) because map preserves
        # input order regardless of completion order.
    return results


def compute_metrics(results: list[EpisodeResult]) -> MetricRow:
    """Aggregate one (baseline, variant) cell; Rwd averages successes only."""
    assert results
    baseline = results[0].baseline
    variant = results[0].variant
    by_seed: dict[int, list[EpisodeResult]] = {}
    for r in results:
        by_seed.setdefault(r.seed, []).append(r)
    seed_sr = [np.mean([r.success for r in rs]) for rs in by_seed.values()]
    seed_inf = [np.mean([r.inf_time_s for r in rs]) for rs in by_seed.values()]
    successes = [r for r in results if r.success]
    rwd = float(np.mean([r.reward for r in successes])) if successes else None
    rwd_std = None
    if successes:
        seed_rwd = [
            np.mean([r.reward for r in rs if r.success])
            for rs in by_seed.values()
            if any(r.success for r in rs)
        ]
        rwd_std = float(np.std(seed_rwd))
    return MetricRow(
        baseline=baseline,
        variant=variant,
        sr=float(np.mean([r.success for r in results])),
        sr_std=float(np.std(seed_sr)),
        rwd=rwd,
        rwd_std=rwd_std,
        inf_time=float(np.mean([r.inf_time_s for r in results])),
        inf_time_std=float(np.std(seed_inf)),
        episodes=len(results),
    )


CSV_COLUMNS = (
    "baseline", "variant", "seed", "episode", "success", "steps", "reward",
    "inf_time_s", "failure_kind",
)


def results_to_csv(results: list[EpisodeResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in results:
        writer.writerow([
            r.baseline, r.variant, r.seed, r.episode,
            "true" if r.success else "false", r.steps,
            format(r.reward, ".17g"), format(r.inf_time_s, ".17g"),
            r.failure_kind,
        ])
    return buf.getvalue()


def results_from_csv(text: str) -> list[EpisodeResult]:
    reader = csv.DictReader(io.StringIO(text))
    out = []
    for row in reader:
        out.append(EpisodeResult(
            baseline=row["baseline"],
            variant=row["variant"],
            seed=int(row["seed"]),
            episode=int(row["episode"]),
            success=row["success"] == "true",
            steps=int(row["steps"]),
            reward=float(row["reward"]),
            inf_time_s=float(row["inf_time_s"]),
            failure_kind=row["failure_kind"],
        ))
    return out


def write_results(results: list[EpisodeResult], path: str | Path) -> None:
    Path(path).write_text(results_to_csv(results), encoding="utf-8")


def read_results(path: str | Path) -> list[EpisodeResult]:
    return results_from_csv(Path(path).read_text(encoding="utf-8"))


def write_episodes_jsonl(results: list[EpisodeResult], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps(r.__dict__) + "\n")


def read_episodes_jsonl(path: str | Path) -> list[EpisodeResult]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(EpisodeResult(**json.loads(line)))
    return out


def render_table(results: list[EpisodeResult]) -> str:
    """A results grid: one section per variant, one column per baseline."""
    cells: dict[tuple[str, str], list[EpisodeResult]] = {}
    for r in results:
        cells.setdefault((r.variant, r.baseline), []).append(r)
    variants = sorted({v for v, _ in cells})
    lines = []
    for variant in variants:
        baselines = sorted({b for v, b in cells if v == variant})
        rows = {b: compute_metrics(cells[(variant, b)]) for b in baselines}
        lines.append(f"== {variant} ==")
        header = f"{'Metric':<12}" + "".join(f"{b:>14}" for b in baselines)
        lines.append(header)
        sr_row = f"{'SR':<12}" + "".join(f"{rows[b].sr:>14.2f}" for b in baselines)
        lines.append(sr_row)
        rwd_cells = [
            f"{rows[b].rwd:>14.1f}" if rows[b].rwd is not None else f"{'--':>14}"
            for b in baselines
        ]
        lines.append(f"{'Rwd':<12}" + "".join(rwd_cells))
        lines.append(
            f"{'Inf-Time':<12}"
            + "".join(f"{rows[b].inf_time:>14.3f}" for b in baselines)
        )
        lines.append("")
    return "\n".join(lines)

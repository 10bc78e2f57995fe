"""Demonstration recording, replay verification, and dataset generation.

Demos store post-clamp, pre-noise actions so replay against the bare
environment is deterministic. The file format is JSONL: a header line, one
line of five numbers per step, and a trailer with the terminal flag.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

from kinder.envcore import ActionDelta
from kinder.state import SceneState
from kinder.suite2d import make_env

SCHEMA_VERSION = 1
DEMO_SUFFIX = ".kd-demo.jsonl"


class UnknownSchema(Exception):
    """The demo file declares an unsupported schema version."""


class VerificationMismatch(Exception):
    """Replay disagreed with the demo's stored terminal flag."""


@dataclass(frozen=True)
class DemoRecord:
    """A seeded, replayable episode trace."""

    env: str
    variant: str
    reset_seed: int
    source: str
    created_at: str
    steps: tuple[ActionDelta, ...]
    terminal_success: bool
    schema_version: int = SCHEMA_VERSION


def record(
    variant: str,
    seed: int,
    action_source: Iterable[ActionDelta],
    source: str = "planner",
    max_steps: int = 10_000,
    now: Callable[[], str] | None = None,
) -> DemoRecord:
    """Run actions from the source until episode end, capturing the trace."""
    env = make_env(variant)
    env.reset(seed)
    created = now() if now is not None else time.strftime(
        "%Y-%m-%dT%H:%M:%SZ", time.gmtime()
    )
    steps: list[ActionDelta] = []
    success = env.check_goal(env.state)
    if not success:
        for action in action_source:
            out = env.step(action)
            steps.append(action)
            if out.terminated:
                success = True
                break
            if len(steps) >= max_steps:
                break
    return DemoRecord(
        env=env.env_name,
        variant=variant,
        reset_seed=seed,
        source=source,
        created_at=created,
        steps=tuple(steps),
        terminal_success=success,
    )


def replay(demo: DemoRecord) -> tuple[SceneState, bool]:
    """Deterministically re-execute a demo; verify the stored outcome."""
    if demo.schema_version != SCHEMA_VERSION:
        raise UnknownSchema(f"schema_version {demo.schema_version} unsupported")
    env = make_env(demo.variant)
    env.reset(demo.reset_seed)
    success = env.check_goal(env.state)
    for action in demo.steps:
        if success:
            break
        out = env.step(action)
        success = out.terminated
    if success != demo.terminal_success:
        raise VerificationMismatch(
            f"replay success={success} but demo stored {demo.terminal_success}"
        )
    return env.state, success


def demo_to_lines(demo: DemoRecord) -> list[str]:
    header = {
        "schema_version": demo.schema_version,
        "env": demo.env,
        "variant": demo.variant,
        "reset_seed": demo.reset_seed,
        "source": demo.source,
        "created_at": demo.created_at,
    }
    lines = [json.dumps(header)]
    for action in demo.steps:
        lines.append(json.dumps([
            action.u_dx, action.u_dy, action.u_dtheta, action.u_ext, action.u_vac,
        ]))
    lines.append(json.dumps({"terminal_success": demo.terminal_success}))
    return lines


def demo_from_lines(lines: list[str]) -> DemoRecord:
    if len(lines) < 2:
        raise UnknownSchema("demo file too short")
    header = json.loads(lines[0])
    version = header.get("schema_version")
    if version != SCHEMA_VERSION:
        raise UnknownSchema(f"schema_version {version} unsupported")
    trailer = json.loads(lines[-1])
    steps = tuple(
        ActionDelta.from_array(json.loads(line)) for line in lines[1:-1]
    )
    return DemoRecord(
        env=header["env"],
        variant=header["variant"],
        reset_seed=int(header["reset_seed"]),
        source=header["source"],
        created_at=header["created_at"],
        steps=steps,
        terminal_success=bool(trailer["terminal_success"]),
    )


def write_demo(demo: DemoRecord, path: str | Path) -> Path:
    """Atomic write (temp file + rename)."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text("\n".join(demo_to_lines(demo)) + "\n", encoding="utf-8")
    os.replace(tmp, path)
    return path


def read_demo(path: str | Path) -> DemoRecord:
    text = Path(path).read_text(encoding="utf-8")
    return demo_from_lines([line for line in text.splitlines() if line.strip()])


@dataclass
class DatasetStats:
    attempts: int = 0
    successes: int = 0
    seeds: list[int] = field(default_factory=list)


def generate_dataset(
    planner: Callable[[object, SceneState, int], list[ActionDelta] | None],
    variant: str,
    n: int,
    base_seed: int = 0,
    now: Callable[[], str] | None = None,
) -> tuple[list[DemoRecord], DatasetStats]:
    """Run the planner over n seeded episodes; successes become demos."""
    assert n >= 1
    from kinder.bench import fnv64

    demos: list[DemoRecord] = []
    stats = DatasetStats()
    for i in range(n):
        seed = fnv64(base_seed, 0x64656D6F, i)
        stats.attempts += 1
        stats.seeds.append(seed)
        env = make_env(variant)
        state = env.reset(seed)
        actions = planner(env, state, seed)
        if actions is None:
            continue
        demo = record(variant, seed, iter(actions), source="planner", now=now)
        if demo.terminal_success:
            demos.append(demo)
            stats.successes += 1
    return demos, stats


def dataset_paths(out_dir: str | Path, demos: list[DemoRecord]) -> Iterator[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for demo in demos:
        yield out / f"{demo.variant}-seed{demo.reset_seed}{DEMO_SUFFIX}"

"""Tests for demonstration recording, replay, and datasets."""

import numpy as np
import pytest

from kinder.baselines import bilevel_solve
from kinder.demos import (
    DemoRecord,
    UnknownSchema,
    VerificationMismatch,
    demo_from_lines,
    demo_to_lines,
    generate_dataset,
    read_demo,
    record,
    replay,
    write_demo,
)
from kinder.envcore import ActionDelta
from kinder.suite2d import make_env


def _solve(variant: str, seed: int):
    env = make_env(variant)
    state = env.reset(seed)
    actions, _ = bilevel_solve(env, state, seed=seed)
    assert actions is not None
    return actions


def test_record_and_replay_bp_rollout():
    actions = _solve("Motion2D-p0", 3)
    demo = record("Motion2D-p0", 3, iter(actions), now=lambda: "2026-01-01T00:00:00Z")
    assert demo.terminal_success
    _, success = replay(demo)
    assert success


def test_zero_length_episode_goal_at_reset():
    env = make_env("Motion2D-p0")
    state = env.reset(1)
    # Construct a trivially-solved record by feeding no actions.
    demo = record("Motion2D-p0", 1, iter([]), now=lambda: "t")
    assert demo.steps == ()
    assert not demo.terminal_success  # seed 1 does not start at the goal


def test_file_round_trip_byte_identical(tmp_path):
    actions = _solve("Motion2D-p0", 5)
    demo = record("Motion2D-p0", 5, iter(actions), now=lambda: "2026-01-01T00:00:00Z")
    path = tmp_path / "m.kd-demo.jsonl"
    write_demo(demo, path)
    text1 = path.read_text()
    roundtrip = read_demo(path)
    write_demo(roundtrip, path)
    assert path.read_text() == text1
    assert roundtrip == demo


def test_mutated_demo_fails_verification():
    actions = _solve("Motion2D-p0", 7)
    demo = record("Motion2D-p0", 7, iter(actions), now=lambda: "t")
    mutated = DemoRecord(
        env=demo.env, variant=demo.variant, reset_seed=demo.reset_seed,
        source=demo.source, created_at=demo.created_at,
        steps=demo.steps[: len(demo.steps) // 2],
        terminal_success=demo.terminal_success,
    )
    with pytest.raises(VerificationMismatch):
        replay(mutated)


def test_unknown_schema_rejected():
    lines = demo_to_lines(record("Motion2D-p0", 2, iter([]), now=lambda: "t"))
    lines[0] = lines[0].replace('"schema_version": 1', '"schema_version": 99')
    with pytest.raises(UnknownSchema):
        demo_from_lines(lines)


def test_demo_replay_deterministic_under_act_noise_recording():
    # Demos store post-clamp, pre-noise actions: replaying the recorded
    # stream on the bare env is exact by construction.
    actions = _solve("Motion2D-p0", 9)
    demo = record("Motion2D-p0", 9, iter(actions), now=lambda: "t")
    state1, _ = replay(demo)
    state2, _ = replay(demo)
    from kinder.state import state_to_json

    assert state_to_json(state1) == state_to_json(state2)


def test_generate_dataset_counts_and_distinct_seeds():
    def planner(env, state, seed):
        actions, _ = bilevel_solve(env, state, seed=seed)
        return actions

    demos, stats = generate_dataset(planner, "Motion2D-p0", 5, base_seed=1,
                                    now=lambda: "t")
    assert stats.attempts == 5
    assert stats.successes == len(demos) >= 4
    assert len(set(stats.seeds)) == 5
    for demo in demos:
        _, success = replay(demo)
        assert success


def test_generate_dataset_all_failures():
    demos, stats = generate_dataset(lambda env, s, seed: None, "Motion2D-p0", 3)
    assert demos == []
    assert stats.attempts == 3
    assert stats.successes == 0


def test_cli_demo_verify(tmp_path):
    from click.testing import CliRunner
    from kinder.cli import main

    actions = _solve("Motion2D-p0", 12)
    demo = record("Motion2D-p0", 12, iter(actions), now=lambda: "t")
    path = tmp_path / "ok.kd-demo.jsonl"
    write_demo(demo, path)
    runner = CliRunner()
    result = runner.invoke(main, ["demo", "verify", str(path)])
    assert result.exit_code == 0, result.output
    assert "ok" in result.output

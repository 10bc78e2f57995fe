"""Search-then-sample bilevel planning over skills and concepts."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from kinder.envcore import ActionDelta, KinematicEnv
from kinder.state import SceneState
from kinder.symbols import InitiationFailed, abstract, env_model, execute_option
from kinder.taskplan import GroundOperator, gbfs_plans, ground


@dataclass(frozen=True)
class BilevelConfig:
    """Budgets for the abstract search and the sampler refinement."""

    max_abstract_plans: int = 10
    abstract_deadline: float = 60.0
    samples_per_step: int = 3
    total_deadline: float = 120.0
    option_step_cap: int = 200


@dataclass
class BilevelStats:
    """Always-returned timing and effort counters."""

    abstract_time: float = 0.0
    refine_time: float = 0.0
    plans_tried: int = 0
    samples_drawn: int = 0
    solved: bool = False

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def bilevel_solve(
    env: KinematicEnv,
    state: SceneState,
    cfg: BilevelConfig | None = None,
    seed: int = 0,
    clock: Callable[[], float] = time.monotonic,
) -> tuple[list[ActionDelta] | None, BilevelStats]:
    """Plan abstractly with GBFS/hFF, then refine by backtracking sampling.

    Returns the concatenated executed actions of the first fully refined
    abstract plan, or None when every abstract plan fails. The action
    sequence replays to the goal on a fresh clone from the same state.
    """
    cfg = cfg or BilevelConfig()
    model = env_model(env.env_name)
    rng = np.random.default_rng(np.uint64(seed))
    stats = BilevelStats()
    started = clock()

    t0 = clock()
    problem = model.problem(env, state)
    gp = ground(model.domain(), problem)
    skills = {s.name: s for s in model.skills}
    plan_stream = gbfs_plans(
        gp, max_plans=cfg.max_abstract_plans, deadline=cfg.abstract_deadline,
        clock=clock,
    )
    stats.abstract_time += clock() - t0

    for plan in _timed_stream(plan_stream, stats, clock):
        stats.plans_tried += 1
        if clock() - started > cfg.total_deadline:
            break
        t0 = clock()
        actions = _refine(env, state, plan, skills, model, cfg, rng, stats,
                          lambda: clock() - started > cfg.total_deadline)
        stats.refine_time += clock() - t0
        if actions is not None:
            stats.solved = True
            return actions, stats
    return None, stats


def _timed_stream(stream, stats: BilevelStats, clock):
    """Attribute the generator's search time to the abstract phase."""
    while True:
        t0 = clock()
        try:
            plan = next(stream)
        except StopIteration:
            stats.abstract_time += clock() - t0
            return
        stats.abstract_time += clock() - t0
        yield plan


def _refine(
    env: KinematicEnv,
    state: SceneState,
    plan: tuple[GroundOperator, ...],
    skills: dict,
    model,
    cfg: BilevelConfig,
    rng: np.random.Generator,
    stats: BilevelStats,
    out_of_time: Callable[[], bool],
) -> list[ActionDelta] | None:
    """Depth-first backtracking refinement of one abstract plan."""
    n = len(plan)
    if n == 0:
        return []
    states: list[SceneState | None] = [state] + [None] * n
    segments: list[list[ActionDelta]] = [[] for _ in range(n)]
    tried = [0] * n
    depth = 0
    while True:
        if depth == n:
            return [a for seg in segments for a in seg]
        if out_of_time():
            return None
        if tried[depth] >= cfg.samples_per_step:
            tried[depth] = 0
            if depth == 0:
                return None
            depth -= 1
            continue
        tried[depth] += 1
        op = plan[depth]
        skill = skills[op.name]
        # op.args exclude nothing: the first argument is the robot.
        objects = op.args
        params = skill.sampler(states[depth], objects, rng)
        stats.samples_drawn += 1
        option_seed = int(rng.integers(0, 2**31 - 1))
        sim = env.clone()
        sim.set_state(states[depth])
        try:
            actions, _, ok = execute_option(
                sim, skill, objects, params, seed=option_seed,
                step_cap=cfg.option_step_cap,
            )
        except InitiationFailed:
            continue
        if not ok:
            continue
        atoms = abstract(sim.state, list(model.predicates))
        if not op.add_effects <= atoms or (op.delete_effects & atoms):
            continue
        states[depth + 1] = sim.state
        segments[depth] = actions
        depth += 1

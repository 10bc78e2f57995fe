"""Sampling-based motion planning over (x, y, theta, ext) configurations.

Bidirectional tree search with straight-line local steering discretized at
the robot's per-step delta bounds, followed by greedy shortcut smoothing.
Deterministic given the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from kinder.envcore import KinematicEnv, RobotConfig, robot_config
from kinder.geom2d import Pose2, wrap_angle
from kinder.state import SceneState

GOAL_BIAS = 0.2
DEFAULT_BUDGET = 5000
_THETA_WEIGHT = 0.5
_MAX_EXTEND_STEPS = 12


@dataclass(frozen=True)
class MotionPlan:
    """A sequence of robot configurations, one per environment step."""

    waypoints: tuple[RobotConfig, ...]


def _config_array(c: RobotConfig) -> np.ndarray:
    return np.array([c.pose.x, c.pose.y, c.pose.theta, c.ext])


def _steer(
    a: RobotConfig, b: RobotConfig, max_deltas: tuple[float, float, float, float]
) -> list[RobotConfig]:
    """Interpolated configs from a to b, each within per-step deltas."""
    dx = b.pose.x - a.pose.x
    dy = b.pose.y - a.pose.y
    dth = wrap_angle(b.pose.theta - a.pose.theta)
    dext = b.ext - a.ext
    steps = max(
        1,
        math.ceil(abs(dx) / max_deltas[0]),
        math.ceil(abs(dy) / max_deltas[1]),
        math.ceil(abs(dth) / max_deltas[2]),
        math.ceil(abs(dext) / max_deltas[3]),
    )
    out = []
    for i in range(1, steps + 1):
        f = i / steps
        out.append(
            RobotConfig(
                Pose2(a.pose.x + f * dx, a.pose.y + f * dy, a.pose.theta + f * dth),
                a.ext + f * dext,
                a.vacuum_on,
            )
        )
    # Land exactly on the target to avoid accumulation drift.
    out[-1] = RobotConfig(b.pose, b.ext, a.vacuum_on)
    return out


def _segment_valid(
    collides_fn: Callable[[RobotConfig], bool],
    max_deltas: tuple[float, float, float, float],
    a: RobotConfig,
    b: RobotConfig,
) -> list[RobotConfig] | None:
    configs = _steer(a, b, max_deltas)
    for c in configs:
        if collides_fn(c):
            return None
    return configs


class _Tree:
    def __init__(self, roots: list[RobotConfig]) -> None:
        self.configs: list[RobotConfig] = list(roots)
        self.parents: list[int] = [-1] * len(roots)
        self._array = np.array([_config_array(c) for c in roots])

    def nearest(self, target: RobotConfig) -> int:
        t = _config_array(target)
        diff = self._array - t
        dth = np.abs(np.angle(np.exp(1j * diff[:, 2])))
        d2 = diff[:, 0] ** 2 + diff[:, 1] ** 2 + (_THETA_WEIGHT * dth) ** 2 + diff[:, 3] ** 2
        return int(np.argmin(d2))

    def add(self, config: RobotConfig, parent: int) -> int:
        self.configs.append(config)
        self.parents.append(parent)
        self._array = np.vstack([self._array, _config_array(config)])
        return len(self.configs) - 1

    def path_to_root(self, idx: int) -> list[RobotConfig]:
        path = []
        while idx >= 0:
            path.append(self.configs[idx])
            idx = self.parents[idx]
        return path


def _extend(
    collides_fn: Callable[[RobotConfig], bool],
    max_deltas: tuple[float, float, float, float],
    tree: _Tree,
    target: RobotConfig,
    max_steps: int = _MAX_EXTEND_STEPS,
) -> tuple[int, bool]:
    """Greedy-extend the tree toward target; returns (new node, reached)."""
    near_idx = tree.nearest(target)
    current = tree.configs[near_idx]
    configs = _steer(current, target, max_deltas)
    parent = near_idx
    added = near_idx
    for i, c in enumerate(configs):
        if i >= max_steps or collides_fn(c):
            return added, False
        added = tree.add(c, parent)
        parent = added
    return added, True


def _connect(
    collides_fn: Callable[[RobotConfig], bool],
    max_deltas: tuple[float, float, float, float],
    tree: _Tree,
    target: RobotConfig,
) -> tuple[int, bool]:
    """Repeatedly extend toward target until blocked or reached."""
    prev = -2
    while True:
        idx, reached = _extend(collides_fn, max_deltas, tree, target, max_steps=10_000)
        if reached:
            return idx, True
        if idx == prev:
            return idx, False
        prev = idx


def plan_motion(
    env: KinematicEnv,
    state: SceneState,
    goal_predicate: Callable[[RobotConfig], bool],
    goal_configs: list[RobotConfig],
    seed: int,
    budget: int = DEFAULT_BUDGET,
    extra_solids: frozenset[str] | None = None,
) -> MotionPlan | None:
    """Plan from the state's current config into the goal region.

    goal_configs seed the goal tree and must satisfy goal_predicate. Returns
    None when no collision-free goal config exists or the expansion budget
    runs out. Objects named in extra_solids are avoided even when the env's
    transition would let the moving body pass through them.
    """
    max_deltas = env.robot_spec.max_deltas

    def collides_fn(c: RobotConfig) -> bool:
        return env.config_collides(state, c, extra_solids=extra_solids)

    start = robot_config(state)
    if collides_fn(start):
        return None
    if goal_predicate(start):
        return MotionPlan((start,))
    valid_goals = [
        g for g in goal_configs if goal_predicate(g) and not collides_fn(g)
    ]
    if not valid_goals:
        return None

    # Straight-line fast path.
    for g in valid_goals:
        segment = _segment_valid(collides_fn, max_deltas, start, g)
        if segment is not None:
            return MotionPlan(tuple([start] + segment))

    rng = np.random.default_rng(np.uint64(seed))
    x0, y0, x1, y1 = env.world
    spec = env.robot_spec
    start_tree = _Tree([start])
    goal_tree = _Tree(valid_goals)
    trees = (start_tree, goal_tree)
    bridge: tuple[int, int] | None = None  # (start tree idx, goal tree idx)

    for it in range(budget):
        a, b = trees[it % 2], trees[(it + 1) % 2]
        if rng.uniform() < GOAL_BIAS:
            pick = b.configs[int(rng.integers(len(b.configs)))]
            sample = pick
        else:
            sample = RobotConfig(
                Pose2(
                    rng.uniform(x0, x1),
                    rng.uniform(y0, y1),
                    rng.uniform(-math.pi, math.pi),
                ),
                rng.uniform(spec.arm_min, spec.arm_max),
                start.vacuum_on,
            )
        new_idx, _ = _extend(collides_fn, max_deltas, a, sample)
        new_config = a.configs[new_idx]
        link_idx, reached = _connect(collides_fn, max_deltas, b, new_config)
        if reached:
            if a is start_tree:
                bridge = (new_idx, link_idx)
            else:
                bridge = (link_idx, new_idx)
            break
    if bridge is None:
        return None

    forward = start_tree.path_to_root(bridge[0])[::-1]
    backward = goal_tree.path_to_root(bridge[1])
    # The goal-tree path walks from the bridge config to a goal root.
    nodes = forward + backward[1:] if backward and forward[-1] == backward[0] else forward + backward
    return MotionPlan(tuple(_shortcut(collides_fn, max_deltas, nodes)))


def _shortcut(
    collides_fn: Callable[[RobotConfig], bool],
    max_deltas: tuple[float, float, float, float],
    nodes: list[RobotConfig],
) -> list[RobotConfig]:
    """Greedy shortcutting, returning validated per-step waypoints.

    From each node, tries the farthest node first and backs off
    geometrically; adjacent nodes already connect by construction.
    """
    waypoints = [nodes[0]]
    i = 0
    n = len(nodes)
    while i < n - 1:
        j = n - 1
        segment = None
        while j > i + 1:
            segment = _segment_valid(collides_fn, max_deltas, nodes[i], nodes[j])
            if segment is not None:
                break
            j = i + max(1, int((j - i) * 0.6))
            if j == i + 1:
                break
        if segment is None:
            j = i + 1
            segment = _segment_valid(collides_fn, max_deltas, nodes[i], nodes[j])
            assert segment is not None
        waypoints.extend(segment)
        i = j
    return waypoints


def follow_plan_action(
    current: RobotConfig, target: RobotConfig, spec
) -> tuple[float, float, float, float]:
    """Normalized action components moving one waypoint along a plan."""
    dth = wrap_angle(target.pose.theta - current.pose.theta)
    return (
        (target.pose.x - current.pose.x) / spec.max_dx,
        (target.pose.y - current.pose.y) / spec.max_dy,
        dth / spec.max_dtheta,
        (target.ext - current.ext) / spec.max_dext,
    )

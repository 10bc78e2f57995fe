"""Parameterized skills as options: initiation, stateful policies, termination.

Each option computes a motion plan at initiation and follows it exactly,
then runs a short contact phase (vacuum toggle, press nudge, or push) at the
end. Policies keep internal memory; a fresh option is built per execution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from kinder.envcore import (
    ATTACH_EPS,
    ActionDelta,
    KinematicEnv,
    RobotConfig,
    attach_scan,
    ee_pose,
    object_shape,
    robot_config,
    robot_vacuum_shape,
)
from kinder.geom2d import (
    Circle,
    PlacedShape,
    Pose2,
    collides,
    contains,
    perimeter_point,
    wrap_angle,
)
from kinder.state import MOVABLE_TYPES, SceneState
from kinder.suite2d.cluttered import inside, region_shape
from kinder.suite2d.obstruction2d import ON_GAP_TOL, is_on, region_top
from kinder.suite2d.stickbutton2d import base_max_y
from kinder.symbols.motion import MotionPlan, follow_plan_action, plan_motion
from kinder.taskplan import OperatorSchema

_CONTACT_GAP = 0.4 * ATTACH_EPS
_EXT_FRACTIONS = (0.0, 0.35, 0.7, 1.0)


class InitiationFailed(Exception):
    """execute_option was called with initiable() false."""


@dataclass
class Option:
    """A temporally extended controller bound to one execution."""

    initiable: Callable[[SceneState], bool]
    policy: Callable[[SceneState], ActionDelta]
    terminal: Callable[[SceneState], bool]


@dataclass(frozen=True)
class SkillDef:
    """A skill: option factory plus operator, sampler, and parameter box."""

    name: str
    object_types: tuple[str, ...]
    param_bounds: tuple[tuple[float, float], ...]
    operator: OperatorSchema
    sampler: Callable[[SceneState, tuple[str, ...], np.random.Generator], np.ndarray]
    option_factory: Callable[
        [KinematicEnv, tuple[str, ...], np.ndarray, int], Option
    ]

    def param_space_str(self) -> str:
        lows = ", ".join(f"{lo:g}" for lo, _ in self.param_bounds)
        highs = ", ".join(f"{hi:g}" for _, hi in self.param_bounds)
        n = len(self.param_bounds)
        return f"Box([{lows}], [{highs}], ({n},), float32)"


def execute_option(
    env: KinematicEnv,
    skill: SkillDef,
    objects: tuple[str, ...],
    params: np.ndarray,
    seed: int = 0,
    step_cap: int = 200,
) -> tuple[list[ActionDelta], list[SceneState], bool]:
    """Run an option on the env until terminal or the step cap.

    Returns (actions, visited states, success). Raises InitiationFailed when
    the option cannot start from the current state.
    """
    option = skill.option_factory(env, objects, np.asarray(params, dtype=float), seed)
    if not option.initiable(env.state):
        raise InitiationFailed(f"{skill.name}{objects} not initiable")
    actions: list[ActionDelta] = []
    states = [env.state]
    for _ in range(step_cap):
        if option.terminal(env.state):
            return actions, states, True
        action = option.policy(env.state)
        out = env.step(action)
        actions.append(action)
        states.append(out.state)
    return actions, states, option.terminal(env.state)


# Option building blocks -----------------------------------------------------


def _ext_candidates(spec) -> list[float]:
    return [spec.arm_min + f * (spec.arm_max - spec.arm_min) for f in _EXT_FRACTIONS]


def _config_goal(cfg: RobotConfig) -> Callable[[RobotConfig], bool]:
    def goal(c: RobotConfig) -> bool:
        return (
            abs(c.pose.x - cfg.pose.x) < 1e-9
            and abs(c.pose.y - cfg.pose.y) < 1e-9
            and abs(wrap_angle(c.pose.theta - cfg.pose.theta)) < 1e-9
            and abs(c.ext - cfg.ext) < 1e-9
        )

    return goal


def _follow(memory: dict, state: SceneState, spec) -> ActionDelta | None:
    """Next plan-following action, or None once the plan is exhausted."""
    plan: MotionPlan = memory["plan"]
    i = memory["i"]
    if i >= len(plan.waypoints):
        return None
    current = robot_config(state)
    ux, uy, uth, ue = follow_plan_action(current, plan.waypoints[i], spec)
    memory["i"] = i + 1
    return ActionDelta(ux, uy, uth, ue, 0.0)


def _lazy_plan_option(env, initiable_fn, compute_fn, tail_fn, terminal_fn) -> Option:
    """Option skeleton: plan on first policy call, follow, then contact phase.

    A failed plan leaves the option idling until the step cap, flagging
    failure without raising.
    """
    memory: dict = {}

    def policy(state: SceneState) -> ActionDelta:
        if "plan" not in memory:
            memory["plan"] = compute_fn(state, memory)
            memory["i"] = 1
        if memory["plan"] is None:
            return ActionDelta()
        action = _follow(memory, state, env.robot_spec)
        if action is not None:
            return action
        return tail_fn(state, memory)

    return Option(initiable_fn, policy, terminal_fn)


def _admissible(env: KinematicEnv, state: SceneState, cfg: RobotConfig) -> bool:
    if "barrier" in state and cfg.pose.y > base_max_y(state):
        return False
    return not env.config_collides(state, cfg)


def _grasp_config(
    env: KinematicEnv, state: SceneState, obj: str, s: float, ext: float
) -> RobotConfig | None:
    """Config placing the vacuum face at a small gap from a perimeter point."""
    spec = env.robot_spec
    px, py, nx, ny = perimeter_point(object_shape(state, obj), s)
    standoff = ext + spec.vacuum_half_w + _CONTACT_GAP
    theta = math.atan2(-ny, -nx)
    cfg = RobotConfig(
        Pose2(px + nx * standoff, py + ny * standoff, theta),
        ext,
        robot_config(state).vacuum_on,
    )
    if not _admissible(env, state, cfg):
        return None
    return cfg


def _exclusive_attach(env: KinematicEnv, state: SceneState, cfg: RobotConfig, obj: str) -> bool:
    """Only the intended object may sit in the vacuum's attach vicinity."""
    vacuum = robot_vacuum_shape(env.robot_spec, cfg)
    for name, otype, _ in state.objects:
        if name == obj or otype.name not in MOVABLE_TYPES or name in state.held:
            continue
        if collides(vacuum, object_shape(state, name), -ATTACH_EPS / 2):
            return False
    return True


def _rigid_config_for_object(
    state: SceneState, obj: str, target: Pose2, ext: float
) -> RobotConfig:
    """Config that carries the held object exactly onto the target pose."""
    current = robot_config(state)
    rel = ee_pose(current).inverse().compose(object_shape(state, obj).pose)
    ee_target = target.compose(rel.inverse())
    base = ee_target.compose(Pose2(-ext, 0.0, 0.0))
    return RobotConfig(base, ext, current.vacuum_on)


_POINT = Circle(1e-9)


def _base_point(state: SceneState) -> PlacedShape:
    return PlacedShape(
        _POINT, Pose2(state.get("robot", "x"), state.get("robot", "y"), 0.0)
    )


def make_move_to_option(
    env: KinematicEnv, region: str, params: np.ndarray, seed: int
) -> Option:
    def reached(state: SceneState) -> bool:
        return contains(region_shape(state, region), _base_point(state))

    def compute(state: SceneState, memory: dict):
        f = state.features(region)
        ox = float(np.clip(params[0], -1, 1)) * max(0.0, float(f[3]) - 0.05)
        oy = float(np.clip(params[1], -1, 1)) * max(0.0, float(f[4]) - 0.05)
        current = robot_config(state)
        cfg = RobotConfig(
            Pose2(float(f[0]) + ox, float(f[1]) + oy, current.pose.theta),
            current.ext,
            current.vacuum_on,
        )

        def in_region(c: RobotConfig) -> bool:
            return contains(region_shape(state, region), PlacedShape(_POINT, c.pose))

        return plan_motion(env, state, in_region, [cfg], seed)

    def tail(state: SceneState, memory: dict) -> ActionDelta:
        return ActionDelta()

    return _lazy_plan_option(env, lambda state: True, compute, tail, reached)


def make_pick_option(env: KinematicEnv, obj: str, s: float, seed: int) -> Option:
    spec = env.robot_spec

    def initiable(state: SceneState) -> bool:
        return not state.held and obj in state

    def compute(state: SceneState, memory: dict):
        _, _, nx, ny = perimeter_point(object_shape(state, obj), s)
        memory["approach"] = (-nx, -ny)
        for ext in _ext_candidates(spec):
            cfg = _grasp_config(env, state, obj, s, ext)
            if cfg is None or not _exclusive_attach(env, state, cfg, obj):
                continue
            plan = plan_motion(env, state, _config_goal(cfg), [cfg], seed)
            if plan is not None:
                return plan
        return None

    def tail(state: SceneState, memory: dict) -> ActionDelta:
        ax, ay = memory["approach"]
        # Creep along the approach normal with the vacuum commanded on.
        return ActionDelta(0.1 * ax, 0.1 * ay, 0.0, 0.0, 1.0)

    def terminal(state: SceneState) -> bool:
        return obj in state.held

    return _lazy_plan_option(env, initiable, compute, tail, terminal)


def make_place_option(
    env: KinematicEnv,
    obj: str,
    dest: str,
    params: np.ndarray,
    seed: int,
    mode: str,
) -> Option:
    """Place a held object inside a region ('inside') or onto it ('on')."""
    spec = env.robot_spec

    def _target_pose(state: SceneState) -> Pose2 | None:
        f = state.features(dest)
        obj_hw = state.get(obj, "half_w")
        obj_hh = state.get(obj, "half_h")
        if mode == "on":
            margin = float(f[3]) - obj_hw - 0.01
            if margin < 0:
                return None
            x = float(f[0]) + float(np.clip(params[0], -1, 1)) * margin
            y = region_top(state, dest) + obj_hh + ON_GAP_TOL / 2
            return Pose2(x, y, 0.0)
        theta = state.get(obj, "theta")
        c, s_ = abs(math.cos(theta)), abs(math.sin(theta))
        aabb_hw = obj_hw * c + obj_hh * s_
        aabb_hh = obj_hw * s_ + obj_hh * c
        mx = float(f[3]) - aabb_hw - 0.01
        my = float(f[4]) - aabb_hh - 0.01
        if mx < 0 or my < 0:
            return None
        x = float(f[0]) + float(np.clip(params[0], -1, 1)) * mx
        y = float(f[1]) + float(np.clip(params[1], -1, 1)) * my
        return Pose2(x, y, theta)

    def initiable(state: SceneState) -> bool:
        return obj in state.held

    def compute(state: SceneState, memory: dict):
        target = _target_pose(state)
        if target is None:
            return None
        for ext in _ext_candidates(spec):
            cfg = _rigid_config_for_object(state, obj, target, ext)
            if not _admissible(env, state, cfg):
                continue
            plan = plan_motion(env, state, _config_goal(cfg), [cfg], seed)
            if plan is not None:
                return plan
        return None

    def tail(state: SceneState, memory: dict) -> ActionDelta:
        return ActionDelta(0.0, 0.0, 0.0, 0.0, -1.0)

    def terminal(state: SceneState) -> bool:
        if obj in state.held:
            return False
        if mode == "on":
            return is_on(state, obj, dest)
        return inside(state, obj, dest)

    return _lazy_plan_option(env, initiable, compute, tail, terminal)


def make_press_option(env: KinematicEnv, button: str, phi: float, seed: int) -> Option:
    spec = env.robot_spec

    def compute(state: SceneState, memory: dict):
        memory["approach"] = (-math.cos(phi), -math.sin(phi))
        s = (phi % (2 * math.pi)) / (2 * math.pi)
        for ext in _ext_candidates(spec):
            cfg = _grasp_config(env, state, button, s, ext)
            if cfg is None:
                continue
            plan = plan_motion(env, state, _config_goal(cfg), [cfg], seed)
            if plan is not None:
                return plan
        return None

    def tail(state: SceneState, memory: dict) -> ActionDelta:
        ax, ay = memory["approach"]
        return ActionDelta(0.1 * ax, 0.1 * ay, 0.0, 0.0, 0.0)

    def terminal(state: SceneState) -> bool:
        return state.get(button, "pressed") > 0.5

    return _lazy_plan_option(env, lambda state: True, compute, tail, terminal)


def make_press_with_stick_option(
    env: KinematicEnv, button: str, stick: str, psi: float, seed: int
) -> Option:
    spec = env.robot_spec

    def initiable(state: SceneState) -> bool:
        return stick in state.held

    def compute(state: SceneState, memory: dict):
        ux, uy = math.cos(psi), math.sin(psi)
        memory["push"] = (ux, uy)
        bx = state.get(button, "x")
        by = state.get(button, "y")
        radius = state.get(button, "radius")
        tip_x = bx - ux * (radius + _CONTACT_GAP)
        tip_y = by - uy * (radius + _CONTACT_GAP)
        current = robot_config(state)
        ee_inv = ee_pose(current).inverse()
        stick_pose = object_shape(state, stick).pose
        half_len = state.get(stick, "half_w")
        for end in (1.0, -1.0):
            wx, wy = stick_pose.apply(end * half_len, 0.0)
            rel = ee_inv.apply(wx, wy)
            for ext in reversed(_ext_candidates(spec)):
                # Solve the base so the stick tip lands at the press point.
                c, s_ = math.cos(psi), math.sin(psi)
                offx = ext + rel[0]
                offy = rel[1]
                base = Pose2(
                    tip_x - (c * offx - s_ * offy),
                    tip_y - (s_ * offx + c * offy),
                    psi,
                )
                cfg = RobotConfig(base, ext, current.vacuum_on)
                if not _admissible(env, state, cfg):
                    continue
                plan = plan_motion(env, state, _config_goal(cfg), [cfg], seed)
                if plan is not None:
                    return plan
        return None

    def tail(state: SceneState, memory: dict) -> ActionDelta:
        ux, uy = memory["push"]
        return ActionDelta(0.1 * ux, 0.1 * uy, 0.0, 0.0, 0.0)

    def terminal(state: SceneState) -> bool:
        return state.get(button, "pressed") > 0.5

    return _lazy_plan_option(env, initiable, compute, tail, terminal)


def make_push_hook_option(
    env: KinematicEnv,
    mbutton: str,
    tbutton: str,
    hook: str,
    contact: float,
    seed: int,
) -> Option:
    spec = env.robot_spec

    def initiable(state: SceneState) -> bool:
        return hook in state.held

    def compute(state: SceneState, memory: dict):
        mx, my = state.get(mbutton, "x"), state.get(mbutton, "y")
        tx, ty = state.get(tbutton, "x"), state.get(tbutton, "y")
        d = math.hypot(tx - mx, ty - my)
        if d < 1e-9:
            memory["push"] = (0.0, 0.0)
            return MotionPlan((robot_config(state),))
        ux, uy = (tx - mx) / d, (ty - my) / d
        memory["push"] = (ux, uy)
        radius = state.get(mbutton, "radius")
        thick = state.get(hook, "half_thick")
        shaft = state.get(hook, "shaft_half_len")
        offset = float(np.clip(contact, -1, 1)) * 0.5 * shaft
        avoid = frozenset({mbutton})
        for flip in (0.0, math.pi):
            theta_hook = math.atan2(uy, ux) - math.pi / 2 + flip
            ax, ay = math.cos(theta_hook), math.sin(theta_hook)
            cx = mx - ux * (thick + radius + _CONTACT_GAP) - ax * offset
            cy = my - uy * (thick + radius + _CONTACT_GAP) - ay * offset
            target = Pose2(cx, cy, theta_hook)
            for ext in _ext_candidates(spec):
                cfg = _rigid_config_for_object(state, hook, target, ext)
                if env.config_collides(state, cfg, extra_solids=avoid):
                    continue
                # Approach without disturbing the button; only the final
                # straight push is allowed to make contact.
                plan = plan_motion(
                    env, state, _config_goal(cfg), [cfg], seed, extra_solids=avoid
                )
                if plan is not None:
                    return plan
        return None

    def tail(state: SceneState, memory: dict) -> ActionDelta:
        ux, uy = memory["push"]
        return ActionDelta(0.8 * ux, 0.8 * uy, 0.0, 0.0, 0.0)

    def terminal(state: SceneState) -> bool:
        mx, my = state.get(mbutton, "x"), state.get(mbutton, "y")
        tx, ty = state.get(tbutton, "x"), state.get(tbutton, "y")
        reach = state.get(mbutton, "radius") + state.get(tbutton, "radius")
        return math.hypot(mx - tx, my - ty) <= reach

    return _lazy_plan_option(env, initiable, compute, tail, terminal)

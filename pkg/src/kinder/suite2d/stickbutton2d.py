"""StickButton2D: press every button, using a stick for out-of-reach ones.

A low barrier confines the robot base to the lower region. Buttons beyond
arm reach above the barrier can only be pressed through a held stick, which
passes over the barrier.
"""

from __future__ import annotations

import math

import numpy as np

from kinder.envcore import (
    ATTACH_EPS,
    GoalSpec,
    object_shape,
    robot_base_shape,
    robot_config,
    robot_vacuum_shape,
)
from kinder.geom2d import Circle, PlacedShape, Pose2, Rect, collides
from kinder.state import SceneState

from kinder.suite2d.base import (
    WORLD,
    Budget,
    Suite2DEnv,
    barrier_entry,
    block_entry,
    boundary_walls,
    button_entry,
    region_entry,
    robot_enclosing_radius,
    robot_entry,
    wall_entry,
)

BARRIER_THICKNESS = 0.15
BUTTON_RADIUS = 0.15
STICK_HALF_LEN = 1.0
STICK_HALF_WIDTH = 0.04

_STICK_COLOR = (0.55, 0.35, 0.2)
_HOLDER_COLOR = (0.8, 0.8, 0.6)


def barrier_bottom(state: SceneState) -> float:
    return state.get("barrier", "y") - state.get("barrier", "half_h")


def base_max_y(state: SceneState) -> float:
    """Highest admissible base-center y under the barrier."""
    return barrier_bottom(state) - state.get("robot", "base_radius") - 0.01


def stick_reach(state: SceneState) -> float:
    """Reach of an end-grasped stick measured from the base center."""
    return (
        state.get("robot", "arm_max")
        + state.get("robot", "vac_half_w")
        + 2 * state.get("stick", "half_w")
    )


def direct_reach(state: SceneState) -> float:
    arm_max = state.get("robot", "arm_max")
    return math.hypot(arm_max + state.get("robot", "vac_half_w"),
                      state.get("robot", "vac_half_h"))


class StickButton2DEnv(Suite2DEnv):
    """Tool use: touch all buttons, pressing far ones through the stick."""

    env_name = "StickButton2D"

    def make_goal(self) -> GoalSpec:
        buttons = [f"button{i}" for i in range(self.variant.count)]

        def predicate(state: SceneState) -> bool:
            return all(state.get(b, "pressed") > 0.5 for b in buttons)

        return GoalSpec(predicate, "press every button")

    def resolve_contact_rules(
        self, before: SceneState, after: SceneState
    ) -> SceneState | None:
        del before
        config = robot_config(after)
        pressers = [
            robot_base_shape(self.robot_spec, config),
            robot_vacuum_shape(self.robot_spec, config),
        ]
        pressers.extend(object_shape(after, name) for name in sorted(after.held))
        updates: dict[str, dict[str, float]] = {}
        for name, otype, vec in after.objects:
            if otype.name != "button" or vec[otype.index("pressed")] > 0.5:
                continue
            button = object_shape(after, name)
            if any(collides(p, button, -ATTACH_EPS / 2) for p in pressers):
                updates[name] = {"pressed": 1.0}
        return after.with_updates(updates) if updates else after

    def generate(self, rng: np.random.Generator) -> SceneState:
        budget = Budget()
        spec = self.robot_spec
        k = self.variant.count
        x0, y0, x1, y1 = WORLD
        n_far = math.ceil(k / 2)
        while True:
            budget.spend()
            entries = [wall_entry(name, **kw) for name, kw in boundary_walls()]
            bc = rng.uniform(4.5, 5.5)
            entries.append(
                barrier_entry("barrier", (x0 + x1) / 2, bc, (x1 - x0) / 2,
                              BARRIER_THICKNESS / 2)
            )
            bar_bottom = bc - BARRIER_THICKNESS / 2
            bar_top = bc + BARRIER_THICKNESS / 2
            max_base_y = bar_bottom - spec.base_radius - 0.01
            reach_direct = math.hypot(spec.arm_max + spec.vacuum_half_w, spec.vacuum_half_h)
            reach_stick = spec.arm_max + spec.vacuum_half_w + 2 * STICK_HALF_LEN

            # Far buttons: beyond direct reach of any admissible base pose,
            # within end-grasped stick reach. The band runs close to the
            # reach limit, so deep buttons demand near-optimal grasps.
            far_lo = max_base_y + reach_direct + BUTTON_RADIUS + ATTACH_EPS + 0.1
            far_hi = min(max_base_y + reach_stick - BUTTON_RADIUS - 0.08, y1 - 0.4)
            near_lo, near_hi = y0 + 0.5, bar_bottom - 0.5
            if far_lo >= far_hi:
                continue
            buttons: list[tuple[float, float]] = []
            ok = True
            for i in range(k):
                placed_here = False
                for _ in range(200):
                    budget.spend()
                    bx = rng.uniform(x0 + 0.5, x1 - 0.5)
                    if i < n_far:
                        by = rng.uniform(far_lo, far_hi)
                    else:
                        by = rng.uniform(near_lo, near_hi)
                    if any(math.hypot(bx - ox, by - oy) < 3.5 * BUTTON_RADIUS
                           for ox, oy in buttons):
                        continue
                    buttons.append((bx, by))
                    entries.append(button_entry(f"button{i}", bx, by, BUTTON_RADIUS))
                    placed_here = True
                    break
                if not placed_here:
                    ok = False
                    break
            if not ok:
                continue

            # Stick in a holder, below the barrier.
            stheta = rng.uniform(-0.25, 0.25)
            sx = rng.uniform(x0 + STICK_HALF_LEN + 0.3, x1 - STICK_HALF_LEN - 0.3)
            sy = rng.uniform(y0 + 0.6, bar_bottom - 0.6)
            stick = PlacedShape(Rect(STICK_HALF_LEN, STICK_HALF_WIDTH), Pose2(sx, sy, stheta))
            near_buttons = [
                PlacedShape(Circle(BUTTON_RADIUS), Pose2(bx, by, 0.0))
                for bx, by in buttons
            ]
            if any(collides(stick, b, -0.1) for b in near_buttons):
                continue
            entries.append(
                block_entry("stick", sx, sy, stheta, STICK_HALF_LEN, STICK_HALF_WIDTH,
                            _STICK_COLOR)
            )
            entries.append(
                region_entry("stick_holder", sx, sy, stheta, STICK_HALF_LEN + 0.1,
                             0.12, _HOLDER_COLOR)
            )

            r = robot_enclosing_radius(spec)
            placed_robot = False
            for _ in range(200):
                budget.spend()
                rx = rng.uniform(x0 + r + 0.1, x1 - r - 0.1)
                ry = rng.uniform(y0 + r + 0.1, max_base_y - (r - spec.base_radius))
                base = PlacedShape(Circle(r), Pose2(rx, ry, 0.0))
                if collides(base, stick, -0.05):
                    continue
                if any(collides(base, b, -0.05) for b in near_buttons):
                    continue
                placed_robot = True
                break
            if not placed_robot:
                continue
            rtheta = rng.uniform(-math.pi, math.pi)
            entries.insert(0, robot_entry(spec, rx, ry, rtheta, spec.arm_min))
            state = SceneState(tuple(entries))
            if self.certify(state):
                return state

    def certify(self, state: SceneState) -> bool:
        k = self.variant.count
        max_y = base_max_y(state)
        reach_d = direct_reach(state)
        reach_s = stick_reach(state)
        bar_bottom = barrier_bottom(state)
        stick_top = state.get("stick", "y") + state.get("stick", "half_w") + 0.1
        if stick_top > bar_bottom + 1.0 and state.get("stick", "theta") > 0.5:
            return False
        for i in range(k):
            by = state.get(f"button{i}", "y")
            radius = state.get(f"button{i}", "radius")
            if by < bar_bottom:
                continue  # directly reachable from below
            if by - max_y > reach_s - radius - 0.05:
                return False
            if by - max_y <= reach_d:
                # Far buttons must genuinely require the stick.
                return False
        return True

"""PushPullHook2D: push a movable button to a target button with an L-hook.

The movable button moves only through quasi-static resolution: when the held
hook penetrates it after a motion, it is translated by the minimum
translation vector; the whole step reverts if that push would drive the
button into a static.
"""

from __future__ import annotations

import math

import numpy as np

from kinder.envcore import GoalSpec, object_shape
from kinder.geom2d import Circle, PlacedShape, Pose2, Rect, collides, min_translation
from kinder.state import SceneState

from kinder.suite2d.base import (
    WORLD,
    Budget,
    Suite2DEnv,
    boundary_walls,
    button_entry,
    hook_entry,
    robot_enclosing_radius,
    robot_entry,
    sample_free_pose,
    wall_entry,
)

_MOVABLE_COLOR = (0.9, 0.25, 0.25)
_TARGET_COLOR = (0.3, 0.75, 0.3)

HOOK_SHAFT_HALF_LEN = 0.5
HOOK_ARM_HALF_LEN = 0.22
HOOK_HALF_THICK = 0.05
MOVABLE_RADIUS = 0.15
TARGET_RADIUS = 0.22


def buttons_touching(state: SceneState) -> bool:
    mx, my = state.get("movable_button", "x"), state.get("movable_button", "y")
    tx, ty = state.get("target_button", "x"), state.get("target_button", "y")
    reach = state.get("movable_button", "radius") + state.get("target_button", "radius")
    return math.hypot(mx - tx, my - ty) <= reach


class PushPullHook2DEnv(Suite2DEnv):
    """Tool use: indirect manipulation of a button through a held hook."""

    env_name = "PushPullHook2D"

    def make_goal(self) -> GoalSpec:
        return GoalSpec(buttons_touching, "push movable_button until it touches target_button")

    def resolve_contact_rules(
        self, before: SceneState, after: SceneState
    ) -> SceneState | None:
        if "hook" not in after.held:
            return after
        hook = object_shape(after, "hook")
        button = object_shape(after, "movable_button")
        if not collides(hook, button, 0.0):
            return after
        mtv = min_translation(hook, button)
        if mtv is None:
            return after
        nx = after.get("movable_button", "x") + mtv[0]
        ny = after.get("movable_button", "y") + mtv[1]
        pushed = PlacedShape(button.shape, Pose2(nx, ny, 0.0))
        for name, otype, _ in after.objects:
            if otype.name != "wall":
                continue
            if collides(pushed, self._shape_of(after, name), 0.0):
                return None
        return after.with_updates({"movable_button": {"x": nx, "y": ny}})

    def generate(self, rng: np.random.Generator) -> SceneState:
        budget = Budget()
        spec = self.robot_spec
        x0, y0, x1, y1 = WORLD
        while True:
            budget.spend()
            entries = [wall_entry(name, **kw) for name, kw in boundary_walls()]
            walls = [
                PlacedShape(Rect(e[2][3], e[2][4]), Pose2(e[2][0], e[2][1], 0.0))
                for e in entries
            ]
            margin = 1.2
            mx = rng.uniform(x0 + margin, x1 - margin)
            my = rng.uniform(y0 + margin, y1 - margin)
            ang = rng.uniform(0.0, 2 * math.pi)
            dist = rng.uniform(1.5, 3.0)
            tx = mx + dist * math.cos(ang)
            ty = my + dist * math.sin(ang)
            if not (x0 + margin < tx < x1 - margin and y0 + margin < ty < y1 - margin):
                continue
            entries.append(button_entry("movable_button", mx, my, MOVABLE_RADIUS, _MOVABLE_COLOR))
            entries.append(button_entry("target_button", tx, ty, TARGET_RADIUS, _TARGET_COLOR))
            movable = PlacedShape(Circle(MOVABLE_RADIUS), Pose2(mx, my, 0.0))

            hook = sample_free_pose(
                rng, budget,
                lambda p: PlacedShape(
                    Rect(HOOK_SHAFT_HALF_LEN + HOOK_ARM_HALF_LEN,
                         HOOK_SHAFT_HALF_LEN + HOOK_ARM_HALF_LEN), p),
                walls + [movable],
                (x0 + 1.0, y0 + 1.0), (x1 - 1.0, y1 - 1.0),
                theta_range=(-math.pi, math.pi), clearance=0.15,
            )
            entries.append(
                hook_entry("hook", hook.pose.x, hook.pose.y, hook.pose.theta,
                           HOOK_SHAFT_HALF_LEN, HOOK_ARM_HALF_LEN, HOOK_HALF_THICK)
            )
            hook_placed = object_shape(SceneState(tuple(entries)), "hook")

            r = robot_enclosing_radius(spec)
            base = sample_free_pose(
                rng, budget, lambda p: PlacedShape(Circle(r), p),
                walls + [movable, hook_placed],
                (x0 + r + 0.1, y0 + r + 0.1), (x1 - r - 0.1, y1 - r - 0.1),
                clearance=0.1,
            )
            rtheta = rng.uniform(-math.pi, math.pi)
            entries.insert(
                0, robot_entry(spec, base.pose.x, base.pose.y, rtheta, spec.arm_min)
            )
            state = SceneState(tuple(entries))
            if self.certify(state):
                return state

    def certify(self, state: SceneState) -> bool:
        # The push corridor from movable to target must avoid the walls.
        mx, my = state.get("movable_button", "x"), state.get("movable_button", "y")
        tx, ty = state.get("target_button", "x"), state.get("target_button", "y")
        d = math.hypot(tx - mx, ty - my)
        if d < 1e-6:
            return True
        corridor = PlacedShape(
            Rect(d / 2 + MOVABLE_RADIUS, MOVABLE_RADIUS + 0.05),
            Pose2((mx + tx) / 2, (my + ty) / 2, math.atan2(ty - my, tx - mx)),
        )
        for name, otype, _ in state.objects:
            if otype.name == "wall" and collides(corridor, object_shape(state, name), 0.0):
                return False
        return True

"""Obstruction2D: place a target block onto a possibly obstructed surface.

Side view: blocks rest on the ground line or on the target surface's top
edge; "on" means the block's x-extent is contained in the surface's and its
bottom edge sits within a small gap of the surface top.
"""

from __future__ import annotations

import math

import numpy as np

from kinder.envcore import GoalSpec
from kinder.geom2d import Circle, PlacedShape, Pose2, Rect, aabb, collides
from kinder.state import SceneState

from kinder.suite2d.base import (
    WORLD,
    Budget,
    Suite2DEnv,
    block_entry,
    boundary_walls,
    region_entry,
    robot_enclosing_radius,
    robot_entry,
    wall_entry,
)

ON_GAP_TOL = 1e-4
_X_CONTAIN_EPS = 1e-6

GROUND_TOP = 0.0
_SURFACE_COLOR = (0.75, 0.55, 0.3)
_GROUND_COLOR = (0.6, 0.6, 0.6)
_TARGET_COLOR = (0.85, 0.15, 0.15)
_OBSTRUCTION_COLOR = (0.2, 0.35, 0.8)


def region_top(state: SceneState, name: str) -> float:
    f = state.features(name)
    return float(f[1] + f[4])


def is_on(state: SceneState, block: str, surface: str) -> bool:
    """Resting-on check: x-extent containment plus a tiny bottom-edge gap."""
    bx0, by0, bx1, _ = aabb(
        PlacedShape(
            Rect(state.get(block, "half_w"), state.get(block, "half_h")),
            Pose2(state.get(block, "x"), state.get(block, "y"), state.get(block, "theta")),
        )
    )
    f = state.features(surface)
    sx0, sx1 = float(f[0] - f[3]), float(f[0] + f[3])
    top = region_top(state, surface)
    if bx0 < sx0 - _X_CONTAIN_EPS or bx1 > sx1 + _X_CONTAIN_EPS:
        return False
    gap = by0 - top
    return -2e-6 <= gap <= ON_GAP_TOL


class Obstruction2DEnv(Suite2DEnv):
    """Pick-and-place with o obstructions that may crowd the target surface."""

    env_name = "Obstruction2D"

    def make_goal(self) -> GoalSpec:
        def predicate(state: SceneState) -> bool:
            return "target_block" not in state.held and is_on(
                state, "target_block", "target_surface"
            )

        return GoalSpec(predicate, "place target_block on target_surface")

    def generate(self, rng: np.random.Generator) -> SceneState:
        budget = Budget()
        spec = self.robot_spec
        o = self.variant.count
        x0, y0, x1, y1 = WORLD
        while True:
            budget.spend()
            entries = [wall_entry(name, **kw) for name, kw in boundary_walls()]
            entries.append(
                region_entry("ground", (x0 + x1) / 2, GROUND_TOP - 0.1, 0.0,
                             (x1 - x0) / 2, 0.1, _GROUND_COLOR)
            )
            surf_hw = rng.uniform(0.7, 1.1)
            surf_hh = 0.15
            sx = rng.uniform(x0 + surf_hw + 0.3, x1 - surf_hw - 0.3)
            sy = GROUND_TOP + surf_hh
            entries.append(
                region_entry("target_surface", sx, sy, 0.0, surf_hw, surf_hh, _SURFACE_COLOR)
            )
            surf_top = sy + surf_hh

            solids: list[PlacedShape] = []
            target_hw = rng.uniform(0.15, 0.25)
            target_hh = rng.uniform(0.15, 0.25)
            # The target block starts on the ground, clear of the surface.
            placed_ok = False
            for _ in range(50):
                budget.spend()
                tx = rng.uniform(x0 + target_hw + 0.05, x1 - target_hw - 0.05)
                if abs(tx - sx) < surf_hw + target_hw + 0.1:
                    continue
                placed_ok = True
                break
            if not placed_ok:
                continue
            ty = GROUND_TOP + target_hh + ON_GAP_TOL / 4
            entries.append(
                block_entry("target_block", tx, ty, 0.0, target_hw, target_hh, _TARGET_COLOR)
            )
            solids.append(PlacedShape(Rect(target_hw, target_hh), Pose2(tx, ty, 0.0)))

            # Obstructions mostly crowd the surface.
            ok = True
            for i in range(o):
                hw = rng.uniform(0.15, 0.3)
                hh = rng.uniform(0.12, 0.25)
                placed_here = False
                for _ in range(200):
                    budget.spend()
                    on_surface = rng.uniform() < 0.75
                    if on_surface:
                        bx = rng.uniform(sx - surf_hw + hw, sx + surf_hw - hw)
                        by = surf_top + hh + ON_GAP_TOL / 4
                    else:
                        bx = rng.uniform(x0 + hw + 0.05, x1 - hw - 0.05)
                        by = GROUND_TOP + hh + ON_GAP_TOL / 4
                    cand = PlacedShape(Rect(hw, hh), Pose2(bx, by, 0.0))
                    if any(collides(cand, s, -0.02) for s in solids):
                        continue
                    entries.append(
                        block_entry(f"obstruction{i}", bx, by, 0.0, hw, hh, _OBSTRUCTION_COLOR)
                    )
                    solids.append(cand)
                    placed_here = True
                    break
                if not placed_here:
                    ok = False
                    break
            if not ok:
                continue

            # Robot floats above the scene, arm pointing down.
            r = robot_enclosing_radius(spec)
            for _ in range(100):
                budget.spend()
                rx = rng.uniform(x0 + r + 0.1, x1 - r - 0.1)
                ry = rng.uniform(4.0, y1 - r - 0.2)
                base = PlacedShape(Circle(r), Pose2(rx, ry, 0.0))
                if not any(collides(base, s, -0.05) for s in solids):
                    break
            else:
                continue
            entries.insert(0, robot_entry(spec, rx, ry, -math.pi / 2, spec.arm_min))
            state = SceneState(tuple(entries))
            if self.certify(state):
                return state

    def certify(self, state: SceneState) -> bool:
        surf = state.features("target_surface")
        target_hw = state.get("target_block", "half_w")
        # A free landing slot must exist once obstructions are relocated.
        if float(surf[3]) < target_hw + 0.05:
            return False
        blocks = [n for n in state.names if state.type_of(n).name == "block"]
        total_width = sum(2 * state.get(b, "half_w") + 0.1 for b in blocks)
        x0, _, x1, _ = WORLD
        return total_width * 1.2 <= (x1 - x0)

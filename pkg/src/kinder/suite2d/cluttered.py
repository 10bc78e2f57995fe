"""ClutteredRetrieval2D and ClutteredStorage2D: pick/place amid clutter."""

from __future__ import annotations

import math

import numpy as np

from kinder.envcore import GoalSpec
from kinder.geom2d import Circle, PlacedShape, Pose2, Rect, collides, contains
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
    sample_free_pose,
    wall_entry,
)

_TARGET_COLOR = (0.85, 0.15, 0.15)
_OBSTRUCTION_COLOR = (0.2, 0.35, 0.8)
_REGION_COLOR = (0.3, 0.8, 0.35)
_SHELF_COLOR = (0.55, 0.4, 0.25)
_BLOCK_COLOR = (0.25, 0.5, 0.85)

SHELF_WALL_THICKNESS = 0.1


def block_shape(state: SceneState, name: str) -> PlacedShape:
    return PlacedShape(
        Rect(state.get(name, "half_w"), state.get(name, "half_h")),
        Pose2(state.get(name, "x"), state.get(name, "y"), state.get(name, "theta")),
    )


def region_shape(state: SceneState, name: str) -> PlacedShape:
    return PlacedShape(
        Rect(state.get(name, "half_w"), state.get(name, "half_h")),
        Pose2(state.get(name, "x"), state.get(name, "y"), state.get(name, "theta")),
    )


def inside(state: SceneState, block: str, region: str) -> bool:
    return contains(region_shape(state, region), block_shape(state, block))


def approach_clear(
    state: SceneState, name: str, solids: list[PlacedShape], vac_half_h: float
) -> bool:
    """Whether some outward face direction admits a vacuum-sized approach."""
    target = block_shape(state, name)
    f = state.features(name)
    for k in range(16):
        ang = 2 * math.pi * k / 16
        probe = PlacedShape(
            Rect(0.3, vac_half_h),
            Pose2(
                float(f[0]) + math.cos(ang) * (float(f[3]) + float(f[4]) + 0.35),
                float(f[1]) + math.sin(ang) * (float(f[3]) + float(f[4]) + 0.35),
                ang,
            ),
        )
        if collides(probe, target, 0.0):
            continue
        if not any(collides(probe, s, 0.0) for s in solids):
            return True
    return False


class ClutteredRetrieval2DEnv(Suite2DEnv):
    """Retrieve a target block that obstructions surround from all sides."""

    env_name = "ClutteredRetrieval2D"

    def make_goal(self) -> GoalSpec:
        def predicate(state: SceneState) -> bool:
            return "target_block" not in state.held and inside(
                state, "target_block", "goal_region"
            )

        return GoalSpec(predicate, "place target_block inside goal_region")

    def generate(self, rng: np.random.Generator) -> SceneState:
        budget = Budget()
        spec = self.robot_spec
        o = self.variant.count
        x0, y0, x1, y1 = WORLD
        while True:
            budget.spend()
            entries = [wall_entry(name, **kw) for name, kw in boundary_walls()]
            walls = [
                PlacedShape(Rect(e[2][3], e[2][4]), Pose2(e[2][0], e[2][1], 0.0))
                for e in entries
            ]

            # Target block in the middle area, ringed by obstructions.
            t_hw, t_hh = rng.uniform(0.12, 0.18, size=2)
            tx = rng.uniform(x0 + 2.5, x1 - 2.5)
            ty = rng.uniform(y0 + 2.5, y1 - 2.5)
            t_theta = rng.uniform(-math.pi, math.pi)
            target = PlacedShape(Rect(t_hw, t_hh), Pose2(tx, ty, t_theta))
            entries.append(
                block_entry("target_block", tx, ty, t_theta, t_hw, t_hh, _TARGET_COLOR)
            )

            solids = [target]
            ok = True
            base_ang = rng.uniform(0.0, 2 * math.pi)
            for i in range(o):
                ang = base_ang + 2 * math.pi * i / max(o, 1)
                placed_here = False
                for _ in range(200):
                    budget.spend()
                    jitter = rng.uniform(-0.25, 0.25)
                    hw, hh = rng.uniform(0.14, 0.22, size=2)
                    dist = rng.uniform(0.05, 0.2) + math.hypot(t_hw, t_hh) + math.hypot(hw, hh)
                    bx = tx + math.cos(ang + jitter) * dist
                    by = ty + math.sin(ang + jitter) * dist
                    btheta = rng.uniform(-math.pi, math.pi)
                    cand = PlacedShape(Rect(hw, hh), Pose2(bx, by, btheta))
                    if any(collides(cand, s, -0.01) for s in solids + walls):
                        continue
                    entries.append(
                        block_entry(f"obstruction{i}", bx, by, btheta, hw, hh,
                                    _OBSTRUCTION_COLOR)
                    )
                    solids.append(cand)
                    placed_here = True
                    break
                if not placed_here:
                    ok = False
                    break
            if not ok:
                continue

            g_hw, g_hh = rng.uniform(0.55, 0.8, size=2)
            region = sample_free_pose(
                rng, budget, lambda p: PlacedShape(Rect(g_hw, g_hh), p),
                solids, (x0 + g_hw + 0.2, y0 + g_hh + 0.2),
                (x1 - g_hw - 0.2, y1 - g_hh - 0.2), clearance=0.4,
            )
            entries.append(
                region_entry("goal_region", region.pose.x, region.pose.y, 0.0,
                             g_hw, g_hh, _REGION_COLOR)
            )

            r = robot_enclosing_radius(spec)
            base = sample_free_pose(
                rng, budget, lambda p: PlacedShape(Circle(r), p),
                solids + walls, (x0 + r + 0.1, y0 + r + 0.1),
                (x1 - r - 0.1, y1 - r - 0.1), clearance=0.1,
            )
            rtheta = rng.uniform(-math.pi, math.pi)
            entries.insert(
                0, robot_entry(spec, base.pose.x, base.pose.y, rtheta, spec.arm_min)
            )
            state = SceneState(tuple(entries))
            if self.certify(state):
                return state

    def certify(self, state: SceneState) -> bool:
        region_f = state.features("goal_region")
        region_area = 4 * float(region_f[3] * region_f[4])
        target_area = 4 * state.get("target_block", "half_w") * state.get(
            "target_block", "half_h"
        )
        obstructions = [n for n in state.names if n.startswith("obstruction")]
        biggest = max(
            (4 * state.get(n, "half_w") * state.get(n, "half_h") for n in obstructions),
            default=0.0,
        )
        if region_area < 2.5 * (target_area + biggest):
            return False
        # Some obstruction (or the target itself) must admit a vacuum approach.
        vac_hh = state.get("robot", "vac_half_h")
        all_solids = {n: block_shape(state, n) for n in ["target_block"] + obstructions}
        for name in ["target_block"] + obstructions:
            others = [s for n, s in all_solids.items() if n != name]
            if approach_clear(state, name, others, vac_hh):
                return True
        return False


class ClutteredStorage2DEnv(Suite2DEnv):
    """Store all blocks inside a three-walled shelf."""

    env_name = "ClutteredStorage2D"

    def make_goal(self) -> GoalSpec:
        blocks = [f"block{i}" for i in range(self.variant.count)]

        def predicate(state: SceneState) -> bool:
            return not state.held and all(
                inside(state, b, "shelf_region") for b in blocks
            )

        return GoalSpec(predicate, "put every block inside shelf_region")

    def generate(self, rng: np.random.Generator) -> SceneState:
        budget = Budget()
        spec = self.robot_spec
        b = self.variant.count
        x0, y0, x1, y1 = WORLD
        while True:
            budget.spend()
            entries = [wall_entry(name, **kw) for name, kw in boundary_walls()]
            walls = [
                PlacedShape(Rect(e[2][3], e[2][4]), Pose2(e[2][0], e[2][1], 0.0))
                for e in entries
            ]
            # Shelf interior scales with the block count; opening faces +x.
            hw = 0.7
            hh = max(1.0, 0.45 * b)
            t = SHELF_WALL_THICKNESS / 2
            sx = rng.uniform(x0 + hw + 0.6, x1 - hw - 2.5)
            sy = rng.uniform(y0 + hh + 0.6, y1 - hh - 0.6)
            shelf_walls = [
                ("shelf_back", sx - hw - t, sy, t, hh + 2 * t),
                ("shelf_low", sx, sy - hh - t, hw + t, t),
                ("shelf_high", sx, sy + hh + t, hw + t, t),
            ]
            for name, wx, wy, whw, whh in shelf_walls:
                entries.append(wall_entry(name, wx, wy, whw, whh, _SHELF_COLOR))
                walls.append(PlacedShape(Rect(whw, whh), Pose2(wx, wy, 0.0)))
            entries.append(
                region_entry("shelf_region", sx, sy, 0.0, hw, hh, _REGION_COLOR)
            )

            solids: list[PlacedShape] = []
            ok = True
            for i in range(b):
                bhw, bhh = rng.uniform(0.12, 0.2, size=2)
                placed_here = False
                for _ in range(300):
                    budget.spend()
                    if rng.uniform() < 0.25:
                        bx = rng.uniform(sx - hw + bhw + 0.02, sx + hw - bhw - 0.02)
                        by = rng.uniform(sy - hh + bhh + 0.02, sy + hh - bhh - 0.02)
                        btheta = 0.0
                    else:
                        bx = rng.uniform(sx + hw + 1.0, x1 - 0.4)
                        by = rng.uniform(y0 + 0.4, y1 - 0.4)
                        btheta = rng.uniform(-math.pi, math.pi)
                    cand = PlacedShape(Rect(bhw, bhh), Pose2(bx, by, btheta))
                    if any(collides(cand, s, -0.04) for s in solids + walls):
                        continue
                    entries.append(
                        block_entry(f"block{i}", bx, by, btheta, bhw, bhh, _BLOCK_COLOR)
                    )
                    solids.append(cand)
                    placed_here = True
                    break
                if not placed_here:
                    ok = False
                    break
            if not ok:
                continue

            r = robot_enclosing_radius(spec)
            base = sample_free_pose(
                rng, budget, lambda p: PlacedShape(Circle(r), p),
                solids + walls, (x0 + r + 0.1, y0 + r + 0.1),
                (x1 - r - 0.1, y1 - r - 0.1), clearance=0.1,
            )
            rtheta = rng.uniform(-math.pi, math.pi)
            entries.insert(
                0, robot_entry(spec, base.pose.x, base.pose.y, rtheta, spec.arm_min)
            )
            state = SceneState(tuple(entries))
            if self.certify(state):
                return state

    def certify(self, state: SceneState) -> bool:
        region_f = state.features("shelf_region")
        interior = 4 * float(region_f[3] * region_f[4])
        blocks = [f"block{i}" for i in range(self.variant.count)]
        total = sum(
            4 * state.get(n, "half_w") * state.get(n, "half_h") for n in blocks
        )
        if interior < 1.5 * total:
            return False
        # The shelf depth must be coverable by the arm from the opening.
        spec_reach = state.get("robot", "arm_max")
        return 2 * float(region_f[3]) <= spec_reach + 0.2

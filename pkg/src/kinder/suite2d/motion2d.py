"""Motion2D: reach a target region, possibly through narrow passages."""

from __future__ import annotations

import math

import numpy as np

from kinder.envcore import GoalSpec, robot_config
from kinder.geom2d import PlacedShape, Pose2, Rect, collides, contains, Circle
from kinder.state import SceneState

from kinder.suite2d.base import (
    WALL_THICKNESS,
    WORLD,
    Budget,
    Suite2DEnv,
    boundary_walls,
    region_entry,
    robot_enclosing_radius,
    robot_entry,
    wall_entry,
)

# Passage walls must be thicker than a max step so the base cannot tunnel.
PASSAGE_WALL_THICKNESS = 0.15
MIN_PASSAGE_MARGIN = 0.02

_REGION_COLOR = (0.3, 0.8, 0.35)


def _region_shape(state: SceneState) -> PlacedShape:
    f = state.features("target_region")
    return PlacedShape(Rect(float(f[3]), float(f[4])), Pose2(float(f[0]), float(f[1]), float(f[2])))


class Motion2DEnv(Suite2DEnv):
    """Navigation with p parallel passage-wall pairs."""

    env_name = "Motion2D"

    def make_goal(self) -> GoalSpec:
        def predicate(state: SceneState) -> bool:
            config = robot_config(state)
            point = PlacedShape(Circle(1e-9), config.pose)
            return contains(_region_shape(state), point)

        return GoalSpec(predicate, "move the robot base center inside target_region")

    def generate(self, rng: np.random.Generator) -> SceneState:
        budget = Budget()
        spec = self.robot_spec
        p = self.variant.count
        x0, y0, x1, y1 = WORLD
        while True:
            budget.spend()
            entries = [wall_entry(name, **kw) for name, kw in boundary_walls()]
            placed = [
                PlacedShape(Rect(e[2][3], e[2][4]), Pose2(e[2][0], e[2][1], 0.0))
                for e in entries
            ]
            min_gap = 2 * spec.base_radius + MIN_PASSAGE_MARGIN
            # Vertical wall pairs with a traversable gap each.
            wall_xs = (
                np.sort(rng.uniform(x0 + 2.0, x1 - 2.0, size=p)) if p > 0 else []
            )
            ok = True
            for i, wx in enumerate(wall_xs):
                if i > 0 and wx - wall_xs[i - 1] < 4 * spec.base_radius:
                    ok = False
                    break
                gap = rng.uniform(min_gap + 0.03, min_gap + 0.5)
                gap_center = rng.uniform(y0 + gap / 2 + 0.2, y1 - gap / 2 - 0.2)
                t = PASSAGE_WALL_THICKNESS / 2
                lo_h = (gap_center - gap / 2 - y0) / 2
                hi_h = (y1 - gap_center - gap / 2) / 2
                for suffix, cy, hh in (
                    ("a", y0 + lo_h, lo_h),
                    ("b", y1 - hi_h, hi_h),
                ):
                    entries.append(
                        wall_entry(f"passage{i}_{suffix}", float(wx), float(cy), t, float(hh))
                    )
                    placed.append(
                        PlacedShape(Rect(t, float(hh)), Pose2(float(wx), float(cy), 0.0))
                    )
            if not ok:
                continue

            # Robot left of all passages, target region right of them. The
            # placement circle covers the retracted arm and vacuum too.
            r = robot_enclosing_radius(spec)
            left_hi = (float(wall_xs[0]) - 0.4) if p > 0 else x1 - r - 0.1
            right_lo = (float(wall_xs[-1]) + 0.4) if p > 0 else x0 + r + 0.1
            budget.spend()
            rx = rng.uniform(x0 + r + 0.1, max(x0 + r + 0.2, left_hi))
            ry = rng.uniform(y0 + r + 0.1, y1 - r - 0.1)
            rtheta = rng.uniform(-math.pi, math.pi)
            base = PlacedShape(Circle(r), Pose2(rx, ry, 0.0))
            if any(collides(base, w, -0.01) for w in placed):
                continue

            half_w = rng.uniform(0.4, 0.7)
            half_h = rng.uniform(0.4, 0.7)
            gx_lo = min(right_lo, x1 - half_w - 0.1)
            gx = rng.uniform(gx_lo, x1 - half_w - 0.05)
            gy = rng.uniform(y0 + half_h + 0.05, y1 - half_h - 0.05)
            if p == 0:
                # Keep start-goal range compatible with short optimal episodes.
                dist = math.hypot(gx - rx, gy - ry)
                if not 1.5 <= dist <= 3.5:
                    continue
            region = PlacedShape(Rect(half_w, half_h), Pose2(gx, gy, 0.0))
            if any(collides(region, w, -0.05) for w in placed):
                continue

            entries.insert(0, robot_entry(spec, rx, ry, rtheta, spec.arm_min))
            entries.append(
                region_entry("target_region", gx, gy, 0.0, half_w, half_h, _REGION_COLOR)
            )
            state = SceneState(tuple(entries))
            if self.certify(state):
                return state

    def certify(self, state: SceneState) -> bool:
        spec = self.robot_spec
        p = self.variant.count
        passages = sorted(
            {n.rsplit("_", 1)[0] for n in state.names if n.startswith("passage")}
        )
        if len(passages) != p:
            return False
        for prefix in passages:
            lo = state.features(f"{prefix}_a")
            hi = state.features(f"{prefix}_b")
            gap = (hi[1] - hi[4]) - (lo[1] + lo[4])
            if gap < 2 * spec.base_radius + MIN_PASSAGE_MARGIN:
                return False
        return True

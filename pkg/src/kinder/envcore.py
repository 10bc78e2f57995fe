"""The environment contract: actions, kinematic transitions, rendering.

Transitions are purely kinematic: a tentative successor is computed from
bounded configuration deltas, and reverted wholesale if it contains any
penetration. A rectangular vacuum on the arm tip rigidly attaches nearby
movable objects while commanded on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from numpy.typing import NDArray

from kinder.geom2d import (
    Circle,
    Compound,
    PlacedShape,
    Pose2,
    Rect,
    collides,
    mask_points,
    wrap_angle,
)
from kinder.state import (
    MOVABLE_TYPES,
    SceneState,
    state_to_json,
)

# Objects closer than this to the vacuum face are attachable ("immediate
# vicinity"); also the contact distance for button pressing.
ATTACH_EPS = 1e-2

# Strict-penetration erosion: resting contact does not collide.
COLLISION_TOL = 1e-6


class GenerationFailed(Exception):
    """Rejection sampling exceeded its attempt budget during reset."""


@dataclass(frozen=True)
class RobotSpec:
    """Fixed robot geometry and per-step configuration delta bounds."""

    base_radius: float = 0.3
    arm_min: float = 0.3
    arm_max: float = 1.5
    vacuum_half_w: float = 0.06
    vacuum_half_h: float = 0.18
    max_dx: float = 0.05
    max_dy: float = 0.05
    max_dtheta: float = 0.1
    max_dext: float = 0.05

    def __post_init__(self) -> None:
        assert self.base_radius > 0
        assert self.arm_min >= self.base_radius
        assert self.arm_max > self.arm_min
        assert min(self.max_dx, self.max_dy, self.max_dtheta, self.max_dext) > 0

    @property
    def max_deltas(self) -> tuple[float, float, float, float]:
        return (self.max_dx, self.max_dy, self.max_dtheta, self.max_dext)


@dataclass(frozen=True)
class RobotConfig:
    """Robot base pose, arm extension, and vacuum switch."""

    pose: Pose2
    ext: float
    vacuum_on: bool

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.pose.x, self.pose.y, self.pose.theta, self.ext)


def _clamp(v: float, lo: float = -1.0, hi: float = 1.0) -> float:
    return min(max(float(v), lo), hi)


@dataclass(frozen=True)
class ActionDelta:
    """A bounded 5-component configuration delta, clamped to [-1, 1].

    The first four components scale the robot spec's per-step deltas; the
    fifth switches the vacuum (positive on, negative off, zero keep).
    """

    u_dx: float = 0.0
    u_dy: float = 0.0
    u_dtheta: float = 0.0
    u_ext: float = 0.0
    u_vac: float = 0.0

    def __post_init__(self) -> None:
        for name in ("u_dx", "u_dy", "u_dtheta", "u_ext", "u_vac"):
            object.__setattr__(self, name, _clamp(getattr(self, name)))

    @staticmethod
    def from_array(a: Iterable[float]) -> ActionDelta:
        vals = list(a)
        return ActionDelta(*vals[:5])

    def as_array(self) -> NDArray[np.float64]:
        return np.array(
            [self.u_dx, self.u_dy, self.u_dtheta, self.u_ext, self.u_vac],
            dtype=np.float64,
        )


@dataclass(frozen=True)
class GoalSpec:
    """An opaque, pure goal predicate over scene states plus a description."""

    predicate: Callable[[SceneState], bool]
    text: str

    def holds(self, state: SceneState) -> bool:
        return bool(self.predicate(state))


@dataclass(frozen=True)
class StepOutcome:
    """The result of one environment step."""

    state: SceneState
    reward: float
    terminated: bool
    info: dict


def robot_config(state: SceneState, name: str = "robot") -> RobotConfig:
    """Read the robot configuration out of a scene state."""
    f = state.features(name)
    return RobotConfig(
        Pose2(float(f[0]), float(f[1]), float(f[2])),
        float(f[3]),
        f[4] > 0.5,
    )


def ee_pose(config: RobotConfig) -> Pose2:
    """End-effector frame: the arm tip at the current extension."""
    return config.pose.compose(Pose2(config.ext, 0.0, 0.0))


def robot_base_shape(spec: RobotSpec, config: RobotConfig) -> PlacedShape:
    return PlacedShape(Circle(spec.base_radius), config.pose)


def robot_vacuum_shape(spec: RobotSpec, config: RobotConfig) -> PlacedShape:
    return PlacedShape(
        Rect(spec.vacuum_half_w, spec.vacuum_half_h), ee_pose(config)
    )


def object_shape(state: SceneState, name: str) -> PlacedShape:
    """The collision shape of a non-robot object, from its features."""
    otype = state.type_of(name)
    f = state.features(name)
    if otype.name == "button":
        return PlacedShape(Circle(float(f[2])), Pose2(float(f[0]), float(f[1]), 0.0))
    pose = Pose2(float(f[0]), float(f[1]), float(f[2]))
    if otype.name == "hook":
        shaft_hl, arm_hl, t = float(f[3]), float(f[4]), float(f[5])
        shape = Compound(
            (
                (Rect(shaft_hl, t), Pose2.identity()),
                (Rect(t, arm_hl), Pose2(shaft_hl - t, arm_hl + t, 0.0)),
            )
        )
        return PlacedShape(shape, pose)
    return PlacedShape(Rect(float(f[3]), float(f[4])), pose)


def attach_scan(state: SceneState, spec: RobotSpec) -> list[str]:
    """Movable, unheld objects within ATTACH_EPS of the vacuum rectangle."""
    config = robot_config(state)
    vacuum = robot_vacuum_shape(spec, config)
    hits = []
    for name, otype, _ in state.objects:
        if otype.name not in MOVABLE_TYPES or name in state.held:
            continue
        if collides(vacuum, object_shape(state, name), -ATTACH_EPS / 2):
            hits.append(name)
    return hits


class KinematicEnv:
    """Base class for the 2D kinematic environments.

    Subclasses provide procedural generation, the goal, solidity rules, and
    optional per-env contact rules. An instance is single-threaded; clones
    are cheap and independent.
    """

    env_name: str = "KinematicEnv"
    world: tuple[float, float, float, float] = (0.0, 0.0, 10.0, 10.0)

    def __init__(self, variant, robot_spec: RobotSpec | None = None) -> None:
        self.variant = variant
        self.robot_spec = robot_spec or RobotSpec()
        self._state: SceneState | None = None
        self._goal: GoalSpec | None = None
        self._static_shapes: dict[str, PlacedShape] = {}

    # Subclass API ---------------------------------------------------------

    def generate(self, rng: np.random.Generator) -> SceneState:
        """Sample a certified-feasible initial state."""
        raise NotImplementedError

    def make_goal(self) -> GoalSpec:
        """The goal for this variant (object names are variant-static)."""
        raise NotImplementedError

    def is_solid(self, name: str, type_name: str) -> bool:
        """Whether an object blocks the robot body and held objects."""
        return type_name in ("wall", "block", "hook")

    def collision_exempt(self, moving: str, obstacle: str) -> bool:
        """Env-specific pass-through pairs (moving part vs obstacle)."""
        del moving, obstacle
        return False

    def resolve_contact_rules(
        self, before: SceneState, after: SceneState
    ) -> SceneState | None:
        """Apply env contact rules after motion; None reverts the step."""
        del before
        return after

    # Environment contract --------------------------------------------------

    @property
    def goal(self) -> GoalSpec:
        if self._goal is None:
            self._goal = self.make_goal()
        return self._goal

    @property
    def state(self) -> SceneState:
        assert self._state is not None, "reset() the environment first"
        return self._state

    def reset(self, seed: int) -> SceneState:
        rng = np.random.default_rng(np.uint64(seed))
        state = self.generate(rng)
        self.set_state(state)
        return state

    def set_state(self, state: SceneState) -> None:
        self._state = state
        self._static_shapes = {}

    def clone(self) -> "KinematicEnv":
        dup = type(self)(self.variant, self.robot_spec)
        if self._state is not None:
            dup.set_state(self._state)
        return dup

    def check_goal(self, state: SceneState) -> bool:
        return self.goal.holds(state)

    def step(self, action: ActionDelta) -> StepOutcome:
        outcome = transition(self, self.state, action)
        self._state = outcome.state
        return outcome

    # Collision machinery ---------------------------------------------------

    def _shape_of(self, state: SceneState, name: str) -> PlacedShape:
        otype = state.type_of(name).name
        if otype in ("wall", "barrier", "region"):
            cached = self._static_shapes.get(name)
            if cached is None:
                cached = object_shape(state, name)
                self._static_shapes[name] = cached
            return cached
        return object_shape(state, name)

    def config_collides(
        self,
        state: SceneState,
        config: RobotConfig,
        held_poses: dict[str, Pose2] | None = None,
        extra_solids: frozenset[str] | None = None,
    ) -> bool:
        """Penetration test for a robot config (plus held objects) in a state.

        Held poses default to the rigid-attachment poses implied by the
        config; pass explicit poses to test tentative placements. Objects in
        extra_solids are treated as solid regardless of their type's rules.
        """
        if held_poses is None:
            held_poses = rigid_held_poses(state, robot_config(state), config)
        base = robot_base_shape(self.robot_spec, config)
        vacuum = robot_vacuum_shape(self.robot_spec, config)
        moving: list[tuple[str, PlacedShape]] = [
            ("__base__", base),
            ("__vacuum__", vacuum),
        ]
        for name, pose in held_poses.items():
            shape = object_shape(state, name)
            moving.append((name, PlacedShape(shape.shape, pose)))
        for obs_name, otype, _ in state.objects:
            type_name = otype.name
            if obs_name in held_poses:
                continue
            barrier = type_name == "barrier"
            forced = extra_solids is not None and obs_name in extra_solids
            if not barrier and not forced and not self.is_solid(obs_name, type_name):
                continue
            obs_shape = self._shape_of(state, obs_name)
            for mov_name, mov_shape in moving:
                # A barrier is low: it blocks only the robot base.
                if barrier and mov_name != "__base__":
                    continue
                if self.collision_exempt(mov_name, obs_name):
                    continue
                if collides(mov_shape, obs_shape, COLLISION_TOL):
                    return True
        return False


def rigid_held_poses(
    state: SceneState, old_config: RobotConfig, new_config: RobotConfig
) -> dict[str, Pose2]:
    """Poses of held objects after rigidly following the end effector."""
    old_ee = ee_pose(old_config)
    new_ee = ee_pose(new_config)
    poses = {}
    for name in sorted(state.held):
        shape = object_shape(state, name)
        rel = old_ee.inverse().compose(shape.pose)
        poses[name] = new_ee.compose(rel)
    return poses


def transition(env: KinematicEnv, state: SceneState, action: ActionDelta) -> StepOutcome:
    """One kinematic step: tentative motion, collision revert, vacuum."""
    spec = env.robot_spec
    config = robot_config(state)
    new_pose = Pose2(
        config.pose.x + action.u_dx * spec.max_dx,
        config.pose.y + action.u_dy * spec.max_dy,
        wrap_angle(config.pose.theta + action.u_dtheta * spec.max_dtheta),
    )
    new_ext = min(max(config.ext + action.u_ext * spec.max_dext, spec.arm_min), spec.arm_max)
    new_config = RobotConfig(new_pose, new_ext, config.vacuum_on)

    held_poses = rigid_held_poses(state, config, new_config)
    reverted = env.config_collides(state, new_config, held_poses)
    if reverted:
        moved = state
    else:
        updates: dict[str, dict[str, float]] = {
            "robot": {
                "x": new_pose.x,
                "y": new_pose.y,
                "theta": new_pose.theta,
                "arm": new_ext,
            }
        }
        for name, pose in held_poses.items():
            updates[name] = {"x": pose.x, "y": pose.y, "theta": pose.theta}
        moved = state.with_updates(updates)
        resolved = env.resolve_contact_rules(state, moved)
        if resolved is None:
            reverted = True
            moved = env.resolve_contact_rules(state, state) or state
        else:
            moved = resolved

    # The vacuum command applies even when the motion was reverted.
    newly_attached: list[str] = []
    released: list[str] = []
    if action.u_vac > 0:
        if not robot_config(moved).vacuum_on:
            moved = moved.with_updates({"robot": {"vac_on": 1.0}})
        hits = attach_scan(moved, spec)
        if hits:
            newly_attached = hits
            updates = {name: {"held": 1.0} for name in hits}
            moved = moved.with_updates(updates, held=moved.held | set(hits))
    elif action.u_vac < 0:
        released = sorted(moved.held)
        updates = {name: {"held": 0.0} for name in released}
        updates.setdefault("robot", {})["vac_on"] = 0.0
        moved = moved.with_updates(updates, held=frozenset())

    terminated = env.check_goal(moved)
    return StepOutcome(
        state=moved,
        reward=-1.0,
        terminated=terminated,
        info={
            "reverted": reverted,
            "newly_attached": newly_attached,
            "released": released,
        },
    )


# Rendering -----------------------------------------------------------------

_BACKGROUND = (245, 245, 245)
_ROBOT_COLOR = (128, 0, 128)
_ARM_COLOR = (80, 80, 80)


def render(
    env: KinematicEnv, state: SceneState, width: int = 256, height: int = 256
) -> NDArray[np.uint8]:
    """Deterministic orthographic rasterization of a scene state."""
    assert width > 0 and height > 0
    x0, y0, x1, y1 = env.world
    margin = 0.05 * max(x1 - x0, y1 - y0)
    wx0, wy0, wx1, wy1 = x0 - margin, y0 - margin, x1 + margin, y1 + margin
    xs = np.linspace(wx0 + (wx1 - wx0) / (2 * width), wx1 - (wx1 - wx0) / (2 * width), width)
    ys = np.linspace(wy1 - (wy1 - wy0) / (2 * height), wy0 + (wy1 - wy0) / (2 * height), height)
    gx, gy = np.meshgrid(xs, ys)
    img = np.empty((height, width, 3), dtype=np.uint8)
    img[:, :] = _BACKGROUND

    def paint(shape: PlacedShape, color: tuple[int, int, int]) -> None:
        mask = mask_points(shape, gx, gy)
        img[mask] = color

    def obj_color(name: str) -> tuple[int, int, int]:
        f = state.features(name)
        otype = state.type_of(name)
        idx = otype.index("r")
        return tuple(int(round(255 * float(f[idx + k]))) for k in range(3))

    order = {"region": 0, "wall": 1, "barrier": 1, "block": 2, "hook": 2, "button": 3}
    drawable = [
        (order[otype.name], name)
        for name, otype, _ in state.objects
        if otype.name in order
    ]
    for _, name in sorted(drawable):
        paint(object_shape(state, name), obj_color(name))

    config = robot_config(state)
    arm = PlacedShape(
        Rect(config.ext / 2, 0.02),
        config.pose.compose(Pose2(config.ext / 2, 0.0, 0.0)),
    )
    paint(arm, _ARM_COLOR)
    paint(robot_base_shape(env.robot_spec, config), _ROBOT_COLOR)
    paint(robot_vacuum_shape(env.robot_spec, config), _ROBOT_COLOR)
    return img


def state_digest(state: SceneState) -> str:
    """Canonical-JSON digest used for bit-exact state comparison."""
    return state_to_json(state)

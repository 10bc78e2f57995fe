"""Shared machinery for the 2D environment suite: variants and generation."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from kinder.envcore import GenerationFailed, KinematicEnv, RobotSpec
from kinder.geom2d import PlacedShape, Pose2, Rect, collides
from kinder.state import (
    BARRIER_TYPE,
    BLOCK_TYPE,
    BUTTON_TYPE,
    HOOK_TYPE,
    REGION_TYPE,
    ROBOT_TYPE,
    WALL_TYPE,
    ObjectTypeDef,
    SceneState,
)

WORLD = (0.0, 0.0, 10.0, 10.0)
WALL_THICKNESS = 0.5

# Variant count letters: p=passages, o=obstructions, b=blocks/buttons.
VALID_LETTERS: dict[str, str] = {
    "Motion2D": "p",
    "Obstruction2D": "o",
    "ClutteredRetrieval2D": "o",
    "ClutteredStorage2D": "b",
    "PushPullHook2D": "o",
    "StickButton2D": "b",
}

_VARIANT_RE = re.compile(r"^([A-Za-z0-9]+)-([a-z])(\d+)$")


class BadVariant(ValueError):
    """A variant string that does not parse or mismatches its environment."""


@dataclass(frozen=True)
class VariantSpec:
    """A constant-object instantiation of an environment."""

    env: str
    letter: str
    count: int
    world: tuple[float, float, float, float] = WORLD

    def __str__(self) -> str:
        return f"{self.env}-{self.letter}{self.count}"


def parse_variant(text: str) -> VariantSpec:
    """Parse `<EnvName>-<letter><count>` (case-sensitive)."""
    m = _VARIANT_RE.match(text)
    if m is None:
        raise BadVariant(
            f"malformed variant {text!r}; expected <EnvName>-<letter><count>, "
            f"e.g. 'StickButton2D-b5'"
        )
    env, letter, count = m.group(1), m.group(2), int(m.group(3))
    if env not in VALID_LETTERS:
        raise BadVariant(
            f"unknown environment {env!r}; valid: {sorted(VALID_LETTERS)}"
        )
    if letter != VALID_LETTERS[env]:
        raise BadVariant(
            f"invalid count letter {letter!r} for {env}; valid letters per "
            f"env: {VALID_LETTERS}"
        )
    if env == "PushPullHook2D" and count != 0:
        raise BadVariant("PushPullHook2D has a single variant: o0")
    return VariantSpec(env, letter, count)


class Budget:
    """Placement-attempt budget for rejection sampling."""

    def __init__(self, limit: int = 10_000) -> None:
        self.left = limit

    def spend(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise GenerationFailed(
                "placement attempt budget exhausted; variant may be infeasible"
            )


def boundary_walls() -> list[tuple[str, dict[str, float]]]:
    """Four boundary walls whose inner edges lie on the world bounds."""
    x0, y0, x1, y1 = WORLD
    t = WALL_THICKNESS / 2
    cy = (y0 + y1) / 2
    cx = (x0 + x1) / 2
    tall = (y1 - y0) / 2 + WALL_THICKNESS
    wide = (x1 - x0) / 2
    return [
        ("wall_left", {"x": x0 - t, "y": cy, "half_w": t, "half_h": tall}),
        ("wall_right", {"x": x1 + t, "y": cy, "half_w": t, "half_h": tall}),
        ("wall_bottom", {"x": cx, "y": y0 - t, "half_w": wide, "half_h": t}),
        ("wall_top", {"x": cx, "y": y1 + t, "half_w": wide, "half_h": t}),
    ]


_GRAY = (0.25, 0.25, 0.28)


def _vec(otype: ObjectTypeDef, values: dict[str, float]) -> np.ndarray:
    vec = np.zeros(otype.dim, dtype=np.float64)
    for feature, value in values.items():
        vec[otype.index(feature)] = value
    return vec


def wall_entry(name: str, x: float, y: float, half_w: float, half_h: float,
               color: tuple[float, float, float] = _GRAY):
    return (name, WALL_TYPE, _vec(WALL_TYPE, {
        "x": x, "y": y, "theta": 0.0, "half_w": half_w, "half_h": half_h,
        "r": color[0], "g": color[1], "b": color[2]}))


def barrier_entry(name: str, x: float, y: float, half_w: float, half_h: float,
                  color: tuple[float, float, float] = (0.85, 0.55, 0.15)):
    return (name, BARRIER_TYPE, _vec(BARRIER_TYPE, {
        "x": x, "y": y, "theta": 0.0, "half_w": half_w, "half_h": half_h,
        "r": color[0], "g": color[1], "b": color[2]}))


def block_entry(name: str, x: float, y: float, theta: float, half_w: float,
                half_h: float, color: tuple[float, float, float]):
    return (name, BLOCK_TYPE, _vec(BLOCK_TYPE, {
        "x": x, "y": y, "theta": theta, "half_w": half_w, "half_h": half_h,
        "held": 0.0, "r": color[0], "g": color[1], "b": color[2]}))


def region_entry(name: str, x: float, y: float, theta: float, half_w: float,
                 half_h: float, color: tuple[float, float, float]):
    return (name, REGION_TYPE, _vec(REGION_TYPE, {
        "x": x, "y": y, "theta": theta, "half_w": half_w, "half_h": half_h,
        "r": color[0], "g": color[1], "b": color[2]}))


def button_entry(name: str, x: float, y: float, radius: float,
                 color: tuple[float, float, float] = (0.95, 0.75, 0.1)):
    return (name, BUTTON_TYPE, _vec(BUTTON_TYPE, {
        "x": x, "y": y, "radius": radius, "pressed": 0.0,
        "r": color[0], "g": color[1], "b": color[2]}))


def hook_entry(name: str, x: float, y: float, theta: float, shaft_half_len: float,
               arm_half_len: float, half_thick: float,
               color: tuple[float, float, float] = (0.45, 0.3, 0.15)):
    return (name, HOOK_TYPE, _vec(HOOK_TYPE, {
        "x": x, "y": y, "theta": theta, "shaft_half_len": shaft_half_len,
        "arm_half_len": arm_half_len, "half_thick": half_thick, "held": 0.0,
        "r": color[0], "g": color[1], "b": color[2]}))


def robot_entry(spec: RobotSpec, x: float, y: float, theta: float, ext: float):
    return ("robot", ROBOT_TYPE, _vec(ROBOT_TYPE, {
        "x": x, "y": y, "theta": theta, "arm": ext, "vac_on": 0.0,
        "base_radius": spec.base_radius, "arm_min": spec.arm_min,
        "arm_max": spec.arm_max, "vac_half_w": spec.vacuum_half_w,
        "vac_half_h": spec.vacuum_half_h}))


def robot_enclosing_radius(spec: RobotSpec) -> float:
    """Radius of a circle covering base plus retracted arm and vacuum."""
    import math

    return max(
        spec.base_radius,
        math.hypot(spec.arm_min + spec.vacuum_half_w, spec.vacuum_half_h),
    )


def world_rect() -> PlacedShape:
    x0, y0, x1, y1 = WORLD
    return PlacedShape(
        Rect((x1 - x0) / 2, (y1 - y0) / 2),
        Pose2((x0 + x1) / 2, (y0 + y1) / 2, 0.0),
    )


def sample_free_pose(
    rng: np.random.Generator,
    budget: Budget,
    shape_fn,
    placed: list[PlacedShape],
    xy_lo: tuple[float, float],
    xy_hi: tuple[float, float],
    theta_range: tuple[float, float] | None = None,
    clearance: float = 0.02,
) -> PlacedShape:
    """Rejection-sample a collision-free placement within bounds.

    shape_fn maps a sampled Pose2 to a PlacedShape. Draws (x, y, theta) in
    that order from the rng for reproducibility.
    """
    while True:
        budget.spend()
        x = rng.uniform(xy_lo[0], xy_hi[0])
        y = rng.uniform(xy_lo[1], xy_hi[1])
        theta = 0.0
        if theta_range is not None:
            theta = rng.uniform(theta_range[0], theta_range[1])
        candidate = shape_fn(Pose2(x, y, theta))
        if any(collides(candidate, other, -clearance) for other in placed):
            continue
        return candidate


class Suite2DEnv(KinematicEnv):
    """Base class for the six environments in the 2D suite."""

    world = WORLD

    def __init__(self, variant: VariantSpec, robot_spec: RobotSpec | None = None):
        if isinstance(variant, str):
            variant = parse_variant(variant)
        if variant.env != self.env_name:
            raise BadVariant(
                f"variant {variant} does not belong to {self.env_name}"
            )
        super().__init__(variant, robot_spec)

    def certify(self, state: SceneState) -> bool:
        """Constructive feasibility certificate for a generated state."""
        raise NotImplementedError

    def layout(self, state: SceneState) -> list[str]:
        """Flattening layout: all non-robot objects in state order."""
        return [n for n in state.names if n != "robot"]

"""The six 2D kinematic environments and their variant registry."""

from __future__ import annotations

from kinder.envcore import KinematicEnv, RobotSpec
from kinder.state import SceneState

from kinder.suite2d.base import (
    BadVariant,
    Suite2DEnv,
    VariantSpec,
    parse_variant,
)
from kinder.suite2d.cluttered import ClutteredRetrieval2DEnv, ClutteredStorage2DEnv
from kinder.suite2d.motion2d import Motion2DEnv
from kinder.suite2d.obstruction2d import Obstruction2DEnv
from kinder.suite2d.pushpullhook2d import PushPullHook2DEnv
from kinder.suite2d.stickbutton2d import StickButton2DEnv

ENV_CLASSES: dict[str, type[Suite2DEnv]] = {
    cls.env_name: cls
    for cls in (
        Motion2DEnv,
        Obstruction2DEnv,
        ClutteredRetrieval2DEnv,
        ClutteredStorage2DEnv,
        PushPullHook2DEnv,
        StickButton2DEnv,
    )
}


def make_env(variant: str | VariantSpec, robot_spec: RobotSpec | None = None) -> Suite2DEnv:
    """Instantiate the environment for a variant string like 'Motion2D-p0'."""
    spec = parse_variant(variant) if isinstance(variant, str) else variant
    return ENV_CLASSES[spec.env](spec, robot_spec)


def generate(variant: str | VariantSpec, seed: int) -> SceneState:
    """Sample the certified initial state for (variant, seed)."""
    env = make_env(variant)
    return env.reset(seed)


def certify_feasible(state: SceneState, variant: str | VariantSpec) -> bool:
    """Environment-specific constructive feasibility checks."""
    spec = parse_variant(variant) if isinstance(variant, str) else variant
    env = ENV_CLASSES[spec.env](spec)
    try:
        return env.certify(state)
    except KeyError:
        return False


__all__ = [
    "BadVariant",
    "ENV_CLASSES",
    "KinematicEnv",
    "Suite2DEnv",
    "VariantSpec",
    "certify_feasible",
    "generate",
    "make_env",
    "parse_variant",
]

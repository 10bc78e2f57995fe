"""kinder: 2D kinematic manipulation environments, skills, and baselines."""

from kinder.envcore import (
    ActionDelta,
    GenerationFailed,
    GoalSpec,
    KinematicEnv,
    RobotConfig,
    RobotSpec,
    StepOutcome,
    render,
)
from kinder.state import SceneState, flatten, state_from_json, state_to_json, unflatten
from kinder.suite2d import VariantSpec, certify_feasible, generate, make_env, parse_variant

__version__ = "0.1.0"

__all__ = [
    "ActionDelta",
    "GenerationFailed",
    "GoalSpec",
    "KinematicEnv",
    "RobotConfig",
    "RobotSpec",
    "SceneState",
    "StepOutcome",
    "VariantSpec",
    "certify_feasible",
    "flatten",
    "generate",
    "make_env",
    "parse_variant",
    "render",
    "state_from_json",
    "state_to_json",
    "unflatten",
    "__version__",
]

"""Concepts and parameterized skills over the 2D environments."""

from kinder.symbols.motion import MotionPlan, follow_plan_action, plan_motion
from kinder.symbols.predicates import PredicateDef, abstract
from kinder.symbols.registry import EnvModel, env_model, skill_registry
from kinder.symbols.skills import (
    InitiationFailed,
    Option,
    SkillDef,
    execute_option,
)

__all__ = [
    "EnvModel",
    "InitiationFailed",
    "MotionPlan",
    "Option",
    "PredicateDef",
    "SkillDef",
    "abstract",
    "env_model",
    "execute_option",
    "follow_plan_action",
    "plan_motion",
    "skill_registry",
]

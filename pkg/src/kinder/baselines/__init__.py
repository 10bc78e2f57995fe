"""Planner baselines: bilevel planning, predictive-sampling MPC, LLM planner."""

from kinder.baselines.bilevel import BilevelConfig, BilevelStats, bilevel_solve
from kinder.baselines.llm import (
    CassetteTransport,
    HttpChatTransport,
    IN_CONTEXT_EXAMPLES,
    LlmPlanRequest,
    ParseOutcome,
    PlanStep,
    ScriptedTransport,
    Transport,
    TransportError,
    llm_solve,
    parse_plan,
)
from kinder.baselines.mpc import (
    MpcConfig,
    interpolate_controls,
    mpc_act,
    zero_control_points,
)
from kinder.baselines.prompts import (
    MissingPlaceholder,
    build_prompt,
    render_controllers,
)

__all__ = [
    "BilevelConfig",
    "BilevelStats",
    "CassetteTransport",
    "HttpChatTransport",
    "IN_CONTEXT_EXAMPLES",
    "LlmPlanRequest",
    "MissingPlaceholder",
    "MpcConfig",
    "ParseOutcome",
    "PlanStep",
    "ScriptedTransport",
    "Transport",
    "TransportError",
    "bilevel_solve",
    "build_prompt",
    "interpolate_controls",
    "llm_solve",
    "mpc_act",
    "parse_plan",
    "render_controllers",
    "zero_control_points",
]

"""Prompt templates and rendering for the language-model planner."""

from __future__ import annotations

from kinder.envcore import KinematicEnv
from kinder.state import SceneState
from kinder.symbols import SkillDef, env_model

ZERO_SHOT_TEMPLATE = """You are highly skilled in robotic task planning, breaking down intricate and long-term tasks into distinct primitive actions.
Consider the following skills a robotic agent can perform. Note that each of these skills takes the form of a `ParameterizedController` and may have both discrete arguments (indicated by the `types` field, referring to objects of particular types),
as well as continuous arguments (indicated by `params_space` field, which is formatted as `Box([<param1_lower_bound>, <param2_lower_bound>, ...], [<param1_upper_bound>, <param2_upper_bound>, ...], (<number_of_params>,), <datatype_of_all_params>)`).

{controllers}

You are only allowed to use the provided skills. It's essential to stick to the format of these basic skills. When creating a plan, replace
the arguments of each skill with specific items or continuous parameters. You can first describe the provided scene and what it indicates about the provided
task objects to help you come up with a plan.

Here is a list of objects present in this scene for this task, along with their type (formatted as <object_name>: <type_name>):
{typed_objects}

And here are the available types (formatted in PDDL style as `<type_name1> <type_name2>... - <parent_type_name>`). You can infer a hierarchy of types via this:
{type_hierarchy}

Finally, here is an expression corresponding to the current task goal that must be achieved:
{goal_str}

Please return a plan that achieves the provided goal from an initial state described below.
{init_state_str}

Please provide your output in the following format (excluding the angle brackets and ellipsis, which are just for illustration purposes).
Be sure to include the parens '(' and ')', as well as square brackets '[' and ']' even if there are no objects/continuous parameters.
Do not bold or italicize or otherwise apply any extra formating to the plan text. Do not provide any numbers for steps in the plan, or
any reasoning for each step below the 'Plan:' heading:
<Explanation of scene + your reasoning>
Plan:
<skill 1 name>(<obj1_name>:<obj1_type_name>, <obj2_name>:<obj2_type_name>, ...)[<continuous_param1_value>, <continuous_param2_value>, ...]
<skill 2 name>(<obj1_name>:<obj1_type_name>, <obj2_name>:<obj2_type_name>, ...)[<continuous_param1_value>, <continuous_param2_value>, ...]
..."""

IN_CONTEXT_TEMPLATE = """Create a high-level plan for completing a task using the allowed actions and visible objects.

Allowed actions: Consider the following skills a robotic agent can perform. Note that each of these skills takes the form of a `ParameterizedController` and may have both discrete arguments (indicated by the `types` field, referring to objects of particular types),
as well as continuous arguments (indicated by `params_space` field, which is formatted as `Box([<param1_lower_bound>, <param2_lower_bound>, ...], [<param1_upper_bound>, <param2_upper_bound>, ...], (<number_of_params>,), <datatype_of_all_params>)`).
{controllers}

Visible objects: Here is a list of objects present in this scene for this task, along with their type (formatted as <object_name>: <type_name>):
{typed_objects}

Here are the available types (formatted in PDDL style as `<type_name1> <type_name2>... - <parent_type_name>`). You can infer a hierarchy of types via this:
{type_hierarchy}

Task description:
{goal_str}

In-context examples:
{in_context_examples}

Please return a plan that achieves the provided goal from an initial state described below.
{init_state_str}

Completed plans: No plan has yet been executed.

Next plans: Please provide your output in the following format (excluding the angle brackets and ellipsis, which are just for illustration purposes).
Be sure to include the parens '(' and ')', as well as square brackets '[' and ']' even if there are no objects/continuous parameters.
Do not bold or italicize or otherwise apply any extra formating to the plan text. Do not provide any numbers for steps in the plan, or
any reasoning for each step below the 'Plan:' heading:
<Explanation of scene + your reasoning>
Plan:
<skill 1 name>(<obj1_name>:<obj1_type_name>, <obj2_name>:<obj2_type_name>, ...)[<continuous_param1_value>, <continuous_param2_value>, ...]
<skill 2 name>(<obj1_name>:<obj1_type_name>, <obj2_name>:<obj2_type_name>, ...)[<continuous_param1_value>, <continuous_param2_value>, ...]
..."""


class MissingPlaceholder(KeyError):
    """A template placeholder could not be filled."""


def render_controllers(skills: list[SkillDef]) -> str:
    """The `{controllers}` block, one ParameterizedController per skill."""
    blocks = []
    for skill in skills:
        types = ", ".join(skill.object_types)
        blocks.append(
            f"ParameterizedController {skill.name}:\n"
            f"    types: [{types}]\n"
            f"    params_space: {skill.param_space_str()}"
        )
    return "\n".join(blocks)


def render_state(state: SceneState, objects: tuple[tuple[str, str], ...]) -> str:
    """A compact, deterministic object-centric state dump."""
    lines = []
    for name, _ in objects:
        otype = state.type_of(name)
        feats = ", ".join(
            f"{f}={state.get(name, f):.6g}" for f in otype.features
        )
        lines.append(f"{name}: {feats}")
    return "\n".join(lines)


def build_prompt(
    env: KinematicEnv,
    state: SceneState,
    skills: list[SkillDef],
    mode: str = "zero_shot",
    examples: list[str] | None = None,
) -> str:
    """Byte-exact template instantiation for the planner request."""
    assert mode in ("zero_shot", "in_context")
    model = env_model(env.env_name)
    objects = model.planning_objects(state)
    goal_atoms = sorted(model.goal_atoms(env))
    fields = {
        "controllers": render_controllers(skills),
        "typed_objects": "\n".join(f"{n}: {t}" for n, t in objects),
        "type_hierarchy": f"{' '.join(model.object_types)} - object",
        "goal_str": "(and " + " ".join(str(a) for a in goal_atoms) + ")",
        "init_state_str": render_state(state, objects),
    }
    if mode == "in_context":
        if not examples:
            raise MissingPlaceholder("in_context_examples")
        fields["in_context_examples"] = "\n\n".join(examples)
        template = IN_CONTEXT_TEMPLATE
    else:
        template = ZERO_SHOT_TEMPLATE
    try:
        return template.format(**fields)
    except KeyError as err:  # pragma: no cover - template drift guard
        raise MissingPlaceholder(str(err)) from err

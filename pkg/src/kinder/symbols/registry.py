"""Per-environment inventories: predicates, skills, and abstract goals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from kinder.envcore import KinematicEnv
from kinder.state import SceneState
from kinder.suite2d.stickbutton2d import barrier_bottom
from kinder.symbols.predicates import (
    AT_TARGET,
    HAND_EMPTY,
    HOLDING_BLOCK,
    HOLDING_HOOK,
    IN_REGION,
    INSIDE,
    LOOSE,
    ON,
    PRESSED,
    PredicateDef,
    REACHABLE,
    UNPRESSED,
    abstract,
)
from kinder.symbols.skills import (
    Option,
    SkillDef,
    make_move_to_option,
    make_pick_option,
    make_place_option,
    make_press_option,
    make_press_with_stick_option,
    make_push_hook_option,
)
from kinder.taskplan import Atom, Domain, OperatorSchema, Predicate, Problem


@dataclass(frozen=True)
class EnvModel:
    """The symbolic interface of one environment."""

    env_name: str
    predicates: tuple[PredicateDef, ...]
    skills: tuple[SkillDef, ...]
    goal_atoms: Callable[[KinematicEnv], frozenset[Atom]]

    @property
    def object_types(self) -> tuple[str, ...]:
        used: set[str] = set()
        for p in self.predicates:
            used.update(p.param_types)
        for s in self.skills:
            used.update(s.object_types)
        return tuple(sorted(used))

    def domain(self) -> Domain:
        preds: dict[tuple[str, tuple[str, ...]], Predicate] = {}
        for p in self.predicates:
            preds[(p.name, p.param_types)] = Predicate(p.name, p.param_types)
        return Domain(
            f"kinder-{self.env_name.lower()}",
            self.object_types,
            tuple(preds.values()),
            tuple(s.operator for s in self.skills),
        )

    def planning_objects(self, state: SceneState) -> tuple[tuple[str, str], ...]:
        used = set(self.object_types)
        return tuple(
            (name, otype.name)
            for name, otype, _ in state.objects
            if otype.name in used
        )

    def problem(self, env: KinematicEnv, state: SceneState) -> Problem:
        return Problem(
            "episode",
            f"kinder-{self.env_name.lower()}",
            self.planning_objects(state),
            abstract(state, list(self.predicates)),
            self.goal_atoms(env),
        )


def _a(pred: str, *args: str) -> Atom:
    return Atom(pred, tuple(args))


_R = ("?robot", "robot")


def _uniform_sampler(lo: float, hi: float, n: int):
    def sampler(state: SceneState, objects: tuple[str, ...], rng: np.random.Generator):
        del state, objects
        return rng.uniform(lo, hi, size=n)

    return sampler


def _pick_sampler(state: SceneState, objects: tuple[str, ...], rng: np.random.Generator):
    u = rng.uniform()
    t = rng.uniform()
    obj = objects[1]
    # Side-view scenes (ground line present): favor top-face grasps, since
    # side and bottom approaches drive the base into the floor.
    if "ground" in state and state.type_of(obj).name == "block" and u < 0.85:
        hw = state.get(obj, "half_w")
        hh = state.get(obj, "half_h")
        perimeter = 4 * (hw + hh)
        return np.array([(2 * hh + t * 2 * hw) / perimeter])
    return np.array([t])


def _end_clearances(state: SceneState, stick: str) -> tuple[float, float]:
    """Free space beyond each stick end for an axial base approach."""
    from kinder.geom2d import Pose2

    spec_reach = (
        state.get("robot", "arm_min")
        + state.get("robot", "vac_half_w")
        + state.get("robot", "base_radius")
        + 0.05
    )
    pose = Pose2(state.get(stick, "x"), state.get(stick, "y"), state.get(stick, "theta"))
    hw = state.get(stick, "half_w")
    out = []
    for sign in (1.0, -1.0):
        tipx, tipy = pose.apply(sign * hw, 0.0)
        c, s = math.cos(pose.theta), math.sin(pose.theta)
        bx = tipx + sign * c * spec_reach
        by = tipy + sign * s * spec_reach
        margin = min(bx, 10.0 - bx, by, 10.0 - by)
        out.append(margin)
    return out[0], out[1]


def _stick_pick_sampler(state: SceneState, objects: tuple[str, ...], rng: np.random.Generator):
    """Bias toward the stick's short end faces for collinear grasps.

    End grasps maximize press reach, so they dominate whenever some
    unpressed button lies beyond the arm's direct reach; ends whose axial
    approach would push the base out of the world are skipped.
    """
    u = rng.uniform()
    t = rng.uniform()
    stick = objects[1]
    hw = state.get(stick, "half_w")
    hh = state.get(stick, "half_h")
    perimeter = 4 * (hw + hh)
    end = 2 * hh / perimeter
    far_needed = any(
        state.get(n, "pressed") <= 0.5
        and "barrier" in state
        and state.get(n, "y") > barrier_bottom(state)
        for n in state.names_of_type("button")
    )
    end_bias = 0.9 if far_needed else 0.6
    right_clear, left_clear = _end_clearances(state, stick)
    radius = state.get("robot", "base_radius")
    ends = []
    if right_clear > radius:
        ends.append(0.0)  # right end face starts the perimeter walk
    if left_clear > radius:
        ends.append((2 * hh + 2 * hw) / perimeter)
    if ends and u < end_bias:
        start = ends[0] if (len(ends) == 1 or u < end_bias / 2) else ends[1]
        return np.array([start + t * end])
    return np.array([t])


def _press_with_stick_sampler(state: SceneState, objects: tuple[str, ...], rng: np.random.Generator):
    button = objects[1]
    jitter = rng.uniform(-0.6, 0.6)
    if "barrier" in state and state.get(button, "y") > barrier_bottom(state):
        return np.array([math.pi / 2 + jitter])
    base = math.atan2(
        state.get(button, "y") - state.get("robot", "y"),
        state.get(button, "x") - state.get("robot", "x"),
    )
    return np.array([base + jitter])


def _move_to_skill() -> SkillDef:
    op = OperatorSchema(
        "MoveTo",
        (_R, ("?region", "region")),
        frozenset(),
        frozenset({_a("InRegion", "?robot", "?region")}),
        frozenset(),
    )

    def factory(env, objects, params, seed) -> Option:
        return make_move_to_option(env, objects[1], params, seed)

    return SkillDef(
        "MoveTo", ("robot", "region"), ((-1.0, 1.0), (-1.0, 1.0)), op,
        _uniform_sampler(-0.8, 0.8, 2), factory,
    )


def _pick_loose_skill() -> SkillDef:
    op = OperatorSchema(
        "Pick",
        (_R, ("?block", "block")),
        frozenset({_a("HandEmpty", "?robot"), _a("Loose", "?block")}),
        frozenset({_a("Holding", "?robot", "?block")}),
        frozenset({_a("HandEmpty", "?robot"), _a("Loose", "?block")}),
    )

    def factory(env, objects, params, seed) -> Option:
        return make_pick_option(env, objects[1], float(params[0]), seed)

    return SkillDef(
        "Pick", ("robot", "block"), ((0.0, 1.0),), op, _pick_sampler, factory,
    )


def _pick_from_region_skill(effect: str, name: str) -> SkillDef:
    op = OperatorSchema(
        name,
        (_R, ("?block", "block"), ("?region", "region")),
        frozenset({_a("HandEmpty", "?robot"), _a(effect, "?block", "?region")}),
        frozenset({_a("Holding", "?robot", "?block")}),
        frozenset({_a("HandEmpty", "?robot"), _a(effect, "?block", "?region")}),
    )

    def factory(env, objects, params, seed) -> Option:
        return make_pick_option(env, objects[1], float(params[0]), seed)

    return SkillDef(
        name, ("robot", "block", "region"), ((0.0, 1.0),), op, _pick_sampler, factory,
    )


def _place_skill(effect: str, mode: str) -> SkillDef:
    n_params = 1 if mode == "on" else 2
    op = OperatorSchema(
        "Place",
        (_R, ("?block", "block"), ("?region", "region")),
        frozenset({_a("Holding", "?robot", "?block")}),
        frozenset({_a(effect, "?block", "?region"), _a("HandEmpty", "?robot")}),
        frozenset({_a("Holding", "?robot", "?block")}),
    )

    def factory(env, objects, params, seed) -> Option:
        return make_place_option(env, objects[1], objects[2], params, seed, mode)

    return SkillDef(
        "Place", ("robot", "block", "region"),
        tuple(((-1.0, 1.0),) * n_params), op,
        _uniform_sampler(-0.8, 0.8, n_params), factory,
    )


def _press_button_skill() -> SkillDef:
    op = OperatorSchema(
        "PressButton",
        (_R, ("?button", "button")),
        frozenset({
            _a("HandEmpty", "?robot"),
            _a("Reachable", "?button"),
            _a("Unpressed", "?button"),
        }),
        frozenset({_a("Pressed", "?button")}),
        frozenset({_a("Unpressed", "?button")}),
    )

    def factory(env, objects, params, seed) -> Option:
        return make_press_option(env, objects[1], float(params[0]), seed)

    return SkillDef(
        "PressButton", ("robot", "button"), ((-math.pi, math.pi),), op,
        _uniform_sampler(-math.pi, math.pi, 1), factory,
    )


def _pick_stick_skill() -> SkillDef:
    op = OperatorSchema(
        "PickStick",
        (_R, ("?stick", "block")),
        frozenset({_a("HandEmpty", "?robot")}),
        frozenset({_a("Holding", "?robot", "?stick")}),
        frozenset({_a("HandEmpty", "?robot")}),
    )

    def factory(env, objects, params, seed) -> Option:
        return make_pick_option(env, objects[1], float(params[0]), seed)

    return SkillDef(
        "PickStick", ("robot", "block"), ((0.0, 1.0),), op, _stick_pick_sampler, factory,
    )


def _press_with_stick_skill() -> SkillDef:
    op = OperatorSchema(
        "PressWithStick",
        (_R, ("?button", "button"), ("?stick", "block")),
        frozenset({
            _a("Holding", "?robot", "?stick"),
            _a("Unpressed", "?button"),
        }),
        frozenset({_a("Pressed", "?button")}),
        frozenset({_a("Unpressed", "?button")}),
    )

    def factory(env, objects, params, seed) -> Option:
        return make_press_with_stick_option(
            env, objects[1], objects[2], float(params[0]), seed
        )

    return SkillDef(
        "PressWithStick", ("robot", "button", "block"), ((-math.pi, math.pi),), op,
        _press_with_stick_sampler, factory,
    )


def _pick_hook_skill() -> SkillDef:
    op = OperatorSchema(
        "PickHook",
        (_R, ("?hook", "hook")),
        frozenset({_a("HandEmpty", "?robot")}),
        frozenset({_a("Holding", "?robot", "?hook")}),
        frozenset({_a("HandEmpty", "?robot")}),
    )

    def factory(env, objects, params, seed) -> Option:
        return make_pick_option(env, objects[1], float(params[0]), seed)

    return SkillDef(
        "PickHook", ("robot", "hook"), ((0.0, 1.0),), op, _pick_sampler, factory,
    )


def _push_with_hook_skill() -> SkillDef:
    op = OperatorSchema(
        "PushButtonWithHook",
        (_R, ("?mbutton", "button"), ("?tbutton", "button"), ("?hook", "hook")),
        frozenset({_a("Holding", "?robot", "?hook")}),
        frozenset({_a("AtTarget", "?mbutton", "?tbutton")}),
        frozenset(),
    )

    def factory(env, objects, params, seed) -> Option:
        return make_push_hook_option(
            env, objects[1], objects[2], objects[3], float(params[0]), seed
        )

    return SkillDef(
        "PushButtonWithHook", ("robot", "button", "button", "hook"),
        ((-1.0, 1.0),), op, _uniform_sampler(-0.8, 0.8, 1), factory,
    )


def _motion_goal(env: KinematicEnv) -> frozenset[Atom]:
    return frozenset({_a("InRegion", "robot", "target_region")})


def _obstruction_goal(env: KinematicEnv) -> frozenset[Atom]:
    return frozenset({_a("On", "target_block", "target_surface")})


def _retrieval_goal(env: KinematicEnv) -> frozenset[Atom]:
    return frozenset({_a("Inside", "target_block", "goal_region")})


def _storage_goal(env: KinematicEnv) -> frozenset[Atom]:
    return frozenset(
        _a("Inside", f"block{i}", "shelf_region") for i in range(env.variant.count)
    )


def _stickbutton_goal(env: KinematicEnv) -> frozenset[Atom]:
    return frozenset(
        _a("Pressed", f"button{i}") for i in range(env.variant.count)
    )


def _hook_goal(env: KinematicEnv) -> frozenset[Atom]:
    return frozenset({_a("AtTarget", "movable_button", "target_button")})


_MODELS: dict[str, EnvModel] = {}


def _register(model: EnvModel) -> None:
    _MODELS[model.env_name] = model


_register(EnvModel(
    "Motion2D",
    (IN_REGION,),
    (_move_to_skill(),),
    _motion_goal,
))
_register(EnvModel(
    "Obstruction2D",
    (HAND_EMPTY, HOLDING_BLOCK, ON),
    (_pick_from_region_skill("On", "Pick"), _place_skill("On", "on")),
    _obstruction_goal,
))
_register(EnvModel(
    "ClutteredRetrieval2D",
    (HAND_EMPTY, HOLDING_BLOCK, INSIDE, LOOSE),
    (_pick_loose_skill(), _pick_from_region_skill("Inside", "PickFrom"),
     _place_skill("Inside", "inside")),
    _retrieval_goal,
))
_register(EnvModel(
    "ClutteredStorage2D",
    (HAND_EMPTY, HOLDING_BLOCK, INSIDE, LOOSE),
    (_pick_loose_skill(), _pick_from_region_skill("Inside", "PickFrom"),
     _place_skill("Inside", "inside")),
    _storage_goal,
))
_register(EnvModel(
    "PushPullHook2D",
    (HAND_EMPTY, HOLDING_HOOK, AT_TARGET),
    (_pick_hook_skill(), _push_with_hook_skill()),
    _hook_goal,
))
_register(EnvModel(
    "StickButton2D",
    (HAND_EMPTY, HOLDING_BLOCK, PRESSED, UNPRESSED, REACHABLE),
    (_press_button_skill(), _pick_stick_skill(), _press_with_stick_skill()),
    _stickbutton_goal,
))


def env_model(env_name: str) -> EnvModel:
    """The symbolic model for an environment family."""
    return _MODELS[env_name]


def skill_registry(env_name: str) -> list[SkillDef]:
    """The per-environment skill inventory."""
    return list(_MODELS[env_name].skills)

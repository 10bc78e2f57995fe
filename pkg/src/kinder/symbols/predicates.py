"""Relational predicates with classifiers over object-centric states."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

from kinder.geom2d import Circle, PlacedShape, Pose2, contains
from kinder.state import SceneState
from kinder.suite2d.cluttered import inside, region_shape
from kinder.suite2d.obstruction2d import is_on
from kinder.suite2d.pushpullhook2d import buttons_touching
from kinder.suite2d.stickbutton2d import barrier_bottom
from kinder.taskplan import Atom


@dataclass(frozen=True)
class PredicateDef:
    """A named relational predicate with a deterministic classifier."""

    name: str
    param_types: tuple[str, ...]
    classifier: Callable[[SceneState, tuple[str, ...]], bool]

    @property
    def arity(self) -> int:
        return len(self.param_types)

    def holds(self, state: SceneState, args: tuple[str, ...]) -> bool:
        return bool(self.classifier(state, args))


def abstract(state: SceneState, predicates: list[PredicateDef]) -> frozenset[Atom]:
    """Exactly the ground atoms whose classifiers are true, deterministically."""
    objects_by_type: dict[str, list[str]] = {}
    for name, otype, _ in state.objects:
        objects_by_type.setdefault(otype.name, []).append(name)
    for names in objects_by_type.values():
        names.sort()
    atoms = set()
    for pred in predicates:
        pools = [objects_by_type.get(t, []) for t in pred.param_types]
        for combo in itertools.product(*pools):
            if pred.holds(state, combo):
                atoms.add(Atom(pred.name, combo))
    return frozenset(atoms)


def _hand_empty(state: SceneState, args: tuple[str, ...]) -> bool:
    del args
    return not state.held


def _holding(state: SceneState, args: tuple[str, ...]) -> bool:
    return args[1] in state.held


def _in_region(state: SceneState, args: tuple[str, ...]) -> bool:
    region = region_shape(state, args[1])
    point = PlacedShape(
        Circle(1e-9), Pose2(state.get(args[0], "x"), state.get(args[0], "y"), 0.0)
    )
    return contains(region, point)


def _on(state: SceneState, args: tuple[str, ...]) -> bool:
    block, region = args
    return block not in state.held and is_on(state, block, region)


def _inside(state: SceneState, args: tuple[str, ...]) -> bool:
    block, region = args
    return block not in state.held and inside(state, block, region)


def _loose(state: SceneState, args: tuple[str, ...]) -> bool:
    """Movable rect neither held nor inside any region."""
    (block,) = args
    if block in state.held:
        return False
    for name, otype, _ in state.objects:
        if otype.name == "region" and inside(state, block, name):
            return False
    return True


def _pressed(state: SceneState, args: tuple[str, ...]) -> bool:
    return state.get(args[0], "pressed") > 0.5


def _unpressed(state: SceneState, args: tuple[str, ...]) -> bool:
    return state.get(args[0], "pressed") <= 0.5


def _reachable(state: SceneState, args: tuple[str, ...]) -> bool:
    """A button the base can approach directly (below the barrier)."""
    (button,) = args
    if "barrier" not in state:
        return True
    return state.get(button, "y") < barrier_bottom(state)


def _at_target(state: SceneState, args: tuple[str, ...]) -> bool:
    # The push goal relates the one movable/target button pair.
    if args != ("movable_button", "target_button"):
        return False
    return buttons_touching(state)


HAND_EMPTY = PredicateDef("HandEmpty", ("robot",), _hand_empty)
HOLDING_BLOCK = PredicateDef("Holding", ("robot", "block"), _holding)
HOLDING_HOOK = PredicateDef("Holding", ("robot", "hook"), _holding)
IN_REGION = PredicateDef("InRegion", ("robot", "region"), _in_region)
ON = PredicateDef("On", ("block", "region"), _on)
INSIDE = PredicateDef("Inside", ("block", "region"), _inside)
LOOSE = PredicateDef("Loose", ("block",), _loose)
PRESSED = PredicateDef("Pressed", ("button",), _pressed)
UNPRESSED = PredicateDef("Unpressed", ("button",), _unpressed)
REACHABLE = PredicateDef("Reachable", ("button",), _reachable)
AT_TARGET = PredicateDef("AtTarget", ("button", "button"), _at_target)

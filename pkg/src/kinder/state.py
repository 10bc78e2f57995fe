"""Object-centric scene states and their canonical serialization.

A scene state maps object names to typed feature vectors. States are
immutable snapshots: mutation helpers return new states.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray


class LayoutMismatch(Exception):
    """A flatten/unflatten layout does not match the state's objects."""


@dataclass(frozen=True)
class ObjectTypeDef:
    """An object type: a name plus an ordered, immutable feature schema."""

    name: str
    features: tuple[str, ...]
    binary_features: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if len(set(self.features)) != len(self.features):
            raise ValueError(f"duplicate feature names in type {self.name!r}")

    @property
    def dim(self) -> int:
        return len(self.features)

    def index(self, feature: str) -> int:
        return self.features.index(feature)


# Shared object types across the 2D environment suite. Every feature vector
# is self-describing: shape dimensions ride along with poses so predicate
# classifiers need no side tables.
ROBOT_TYPE = ObjectTypeDef(
    "robot",
    (
        "x",
        "y",
        "theta",
        "arm",
        "vac_on",
        "base_radius",
        "arm_min",
        "arm_max",
        "vac_half_w",
        "vac_half_h",
    ),
    binary_features=frozenset({"vac_on"}),
)
WALL_TYPE = ObjectTypeDef(
    "wall", ("x", "y", "theta", "half_w", "half_h", "r", "g", "b")
)
BARRIER_TYPE = ObjectTypeDef(
    "barrier", ("x", "y", "theta", "half_w", "half_h", "r", "g", "b")
)
BLOCK_TYPE = ObjectTypeDef(
    "block",
    ("x", "y", "theta", "half_w", "half_h", "held", "r", "g", "b"),
    binary_features=frozenset({"held"}),
)
HOOK_TYPE = ObjectTypeDef(
    "hook",
    (
        "x",
        "y",
        "theta",
        "shaft_half_len",
        "arm_half_len",
        "half_thick",
        "held",
        "r",
        "g",
        "b",
    ),
    binary_features=frozenset({"held"}),
)
BUTTON_TYPE = ObjectTypeDef(
    "button",
    ("x", "y", "radius", "pressed", "r", "g", "b"),
    binary_features=frozenset({"pressed"}),
)
REGION_TYPE = ObjectTypeDef(
    "region", ("x", "y", "theta", "half_w", "half_h", "r", "g", "b")
)

TYPES_BY_NAME: dict[str, ObjectTypeDef] = {
    t.name: t
    for t in (
        ROBOT_TYPE,
        WALL_TYPE,
        BARRIER_TYPE,
        BLOCK_TYPE,
        HOOK_TYPE,
        BUTTON_TYPE,
        REGION_TYPE,
    )
}

# Types whose instances can be vacuum-attached and moved.
MOVABLE_TYPES = frozenset({"block", "hook"})


@dataclass(frozen=True)
class SceneState:
    """Ordered map from object name to (type, features), plus held names."""

    objects: tuple[tuple[str, ObjectTypeDef, NDArray[np.float64]], ...]
    held: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        for name, otype, vec in self.objects:
            if vec.shape != (otype.dim,):
                raise ValueError(
                    f"{name}: expected {otype.dim} features, got {vec.shape}"
                )
        names = [name for name, _, _ in self.objects]
        if len(set(names)) != len(names):
            raise ValueError("duplicate object names")
        for name in self.held:
            if self.type_of(name).name not in MOVABLE_TYPES:
                raise ValueError(f"held object {name!r} is not movable")

    def _entry(self, name: str) -> tuple[str, ObjectTypeDef, NDArray[np.float64]]:
        for entry in self.objects:
            if entry[0] == name:
                return entry
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [name for name, _, _ in self.objects]

    def __contains__(self, name: str) -> bool:
        return any(entry[0] == name for entry in self.objects)

    def type_of(self, name: str) -> ObjectTypeDef:
        return self._entry(name)[1]

    def features(self, name: str) -> NDArray[np.float64]:
        return self._entry(name)[2]

    def get(self, name: str, feature: str) -> float:
        _, otype, vec = self._entry(name)
        return float(vec[otype.index(feature)])

    def with_updates(
        self,
        updates: dict[str, dict[str, float]],
        held: frozenset[str] | None = None,
    ) -> SceneState:
        """A copy with per-object feature updates and optionally new held set."""
        new_objects = []
        for name, otype, vec in self.objects:
            if name in updates:
                vec = vec.copy()
                for feature, value in updates[name].items():
                    vec[otype.index(feature)] = value
            new_objects.append((name, otype, vec))
        return SceneState(
            tuple(new_objects), self.held if held is None else held
        )

    def names_of_type(self, type_name: str) -> list[str]:
        return [name for name, otype, _ in self.objects if otype.name == type_name]


def _fmt(value: float) -> str:
    # 17 significant digits guarantee a bit-exact float round-trip.
    return format(float(value), ".17g")


def state_to_json(state: SceneState) -> str:
    """Canonical JSON for a scene state (deterministic bytes)."""
    obj_strs = []
    for name, otype, vec in state.objects:
        feats = ", ".join(_fmt(v) for v in vec)
        obj_strs.append(
            f'{{"name": {json.dumps(name)}, "type": {json.dumps(otype.name)}, '
            f'"features": [{feats}]}}'
        )
    held = ", ".join(json.dumps(n) for n in sorted(state.held))
    return f'{{"objects": [{", ".join(obj_strs)}], "held": [{held}]}}'


def state_from_json(text: str) -> SceneState:
    """Parse a canonical scene-state JSON string."""
    data = json.loads(text)
    objects = []
    for entry in data["objects"]:
        otype = TYPES_BY_NAME[entry["type"]]
        vec = np.array(entry["features"], dtype=np.float64)
        objects.append((entry["name"], otype, vec))
    return SceneState(tuple(objects), frozenset(data["held"]))


def flatten(state: SceneState, layout: list[str]) -> NDArray[np.float64]:
    """Concatenate robot features then each layout object's features.

    The layout must list exactly the non-robot objects of the state.
    """
    robots = state.names_of_type("robot")
    if len(robots) != 1:
        raise LayoutMismatch("state must contain exactly one robot")
    non_robot = [n for n in state.names if n not in robots]
    if sorted(layout) != sorted(non_robot):
        raise LayoutMismatch(
            f"layout {layout} does not match objects {non_robot}"
        )
    pieces = [state.features(robots[0])]
    pieces.extend(state.features(name) for name in layout)
    return np.concatenate(pieces)


def unflatten(
    vector: NDArray[np.float64], layout: list[str], template: SceneState
) -> SceneState:
    """Reconstruct a state from a flat vector using a template for typing."""
    robots = template.names_of_type("robot")
    if len(robots) != 1:
        raise LayoutMismatch("template must contain exactly one robot")
    order = robots + list(layout)
    offsets: dict[str, NDArray[np.float64]] = {}
    pos = 0
    for name in order:
        dim = template.type_of(name).dim
        if pos + dim > vector.shape[0]:
            raise LayoutMismatch("vector too short for layout")
        offsets[name] = vector[pos : pos + dim].copy()
        pos += dim
    if pos != vector.shape[0]:
        raise LayoutMismatch("vector too long for layout")
    objects = tuple(
        (name, otype, offsets[name]) for name, otype, _ in template.objects
    )
    held = frozenset(
        name
        for name, otype, vec in objects
        if "held" in otype.features and vec[otype.index("held")] > 0.5
    )
    return SceneState(objects, held)

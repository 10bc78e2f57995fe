"""STRIPS-subset planning model: typed operators, grounding, validation.

Positive conjunctive preconditions and goals only; no conditional effects,
no costs. Negations are expected to be modeled with complementary
predicates at the layer above.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


@dataclass(frozen=True, order=True)
class Predicate:
    """A relational predicate symbol with typed parameters."""

    name: str
    param_types: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.param_types)


@dataclass(frozen=True, order=True)
class Atom:
    """A predicate applied to arguments (variables `?x` or object names)."""

    predicate: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        if not self.args:
            return f"({self.predicate})"
        return f"({self.predicate} {' '.join(self.args)})"

    @property
    def is_ground(self) -> bool:
        return not any(a.startswith("?") for a in self.args)

    def substitute(self, binding: dict[str, str]) -> Atom:
        return Atom(self.predicate, tuple(binding.get(a, a) for a in self.args))


@dataclass(frozen=True)
class OperatorSchema:
    """A lifted operator: typed parameters, preconditions, add/delete sets."""

    name: str
    parameters: tuple[tuple[str, str], ...]
    preconditions: frozenset[Atom]
    add_effects: frozenset[Atom]
    delete_effects: frozenset[Atom]

    def __post_init__(self) -> None:
        if self.add_effects & self.delete_effects:
            raise ValueError(f"{self.name}: add and delete effects intersect")
        params = {v for v, _ in self.parameters}
        for atom in self.preconditions | self.add_effects | self.delete_effects:
            for arg in atom.args:
                if arg.startswith("?") and arg not in params:
                    raise ValueError(f"{self.name}: unbound variable {arg}")

    def ground(self, args: tuple[str, ...]) -> GroundOperator:
        binding = {v: a for (v, _), a in zip(self.parameters, args)}
        return GroundOperator(
            self.name,
            args,
            frozenset(a.substitute(binding) for a in self.preconditions),
            frozenset(a.substitute(binding) for a in self.add_effects),
            frozenset(a.substitute(binding) for a in self.delete_effects),
        )


@dataclass(frozen=True, order=True)
class GroundOperator:
    """A fully instantiated operator."""

    name: str
    args: tuple[str, ...]
    preconditions: frozenset[Atom] = field(compare=False)
    add_effects: frozenset[Atom] = field(compare=False)
    delete_effects: frozenset[Atom] = field(compare=False)

    @property
    def short_str(self) -> str:
        return f"{self.name}({', '.join(self.args)})"

    def applicable(self, atoms: frozenset[Atom]) -> bool:
        return self.preconditions <= atoms

    def apply(self, atoms: frozenset[Atom]) -> frozenset[Atom]:
        return (atoms - self.delete_effects) | self.add_effects


@dataclass(frozen=True)
class Domain:
    """A planning domain: types, predicates, lifted operators."""

    name: str
    types: tuple[str, ...]
    predicates: tuple[Predicate, ...]
    operators: tuple[OperatorSchema, ...]

    def predicate(self, name: str) -> Predicate:
        for p in self.predicates:
            if p.name == name:
                return p
        raise KeyError(name)


@dataclass(frozen=True)
class Problem:
    """A planning problem over a domain."""

    name: str
    domain_name: str
    objects: tuple[tuple[str, str], ...]
    init: frozenset[Atom]
    goal: frozenset[Atom]


@dataclass(frozen=True)
class GroundProblem:
    """A grounded problem: closed operator set plus init and goal atoms."""

    objects: tuple[tuple[str, str], ...]
    operators: tuple[GroundOperator, ...]
    init: frozenset[Atom]
    goal: frozenset[Atom]


def all_bindings(
    schema: OperatorSchema, objects_by_type: dict[str, list[str]]
) -> list[tuple[str, ...]]:
    """Type-consistent parameter bindings in deterministic order."""
    pools = [objects_by_type.get(t, []) for _, t in schema.parameters]
    return list(itertools.product(*pools))


def ground(domain: Domain, problem: Problem) -> GroundProblem:
    """Instantiate all type-consistent operators with static pruning.

    Atoms of predicates never added by any operator are static: operators
    requiring a static atom absent from init are pruned.
    """
    objects_by_type: dict[str, list[str]] = {}
    for name, type_name in problem.objects:
        objects_by_type.setdefault(type_name, []).append(name)
    for names in objects_by_type.values():
        names.sort()
    added_predicates = {
        atom.predicate for op in domain.operators for atom in op.add_effects
    }
    ground_ops = []
    for schema in domain.operators:
        for args in all_bindings(schema, objects_by_type):
            op = schema.ground(args)
            static_ok = all(
                pre in problem.init
                for pre in op.preconditions
                if pre.predicate not in added_predicates
            )
            if static_ok:
                ground_ops.append(op)
    return GroundProblem(
        tuple(problem.objects), tuple(ground_ops), problem.init, problem.goal
    )


def validate_plan(
    init: frozenset[Atom], goal: frozenset[Atom], plan: tuple[GroundOperator, ...]
) -> bool:
    """Independent forward STRIPS simulation of a plan."""
    atoms = init
    for op in plan:
        if not op.applicable(atoms):
            return False
        atoms = op.apply(atoms)
    return goal <= atoms

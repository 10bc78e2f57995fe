"""Symbolic planning substrate: STRIPS subset, parser, hFF, plan search."""

from kinder.taskplan.model import (
    Atom,
    Domain,
    GroundOperator,
    GroundProblem,
    OperatorSchema,
    Predicate,
    Problem,
    all_bindings,
    ground,
    validate_plan,
)
from kinder.taskplan.parser import (
    ParseError,
    domain_to_text,
    parse_domain,
    parse_problem,
    problem_to_text,
)
from kinder.taskplan.search import gbfs_plans, hff

__all__ = [
    "Atom",
    "Domain",
    "GroundOperator",
    "GroundProblem",
    "OperatorSchema",
    "ParseError",
    "Predicate",
    "Problem",
    "all_bindings",
    "domain_to_text",
    "gbfs_plans",
    "ground",
    "hff",
    "parse_domain",
    "parse_problem",
    "problem_to_text",
    "validate_plan",
]

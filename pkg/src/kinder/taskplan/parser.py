"""Textual domain/problem format: an s-expression subset with round-trip.

Files use the `.kd-pddl` extension. The grammar is:

    (define (domain <name>)
      (:types <name>*)
      (:predicates (<name> ?v - <type> ...)*)
      (:action <name>
        :parameters (?v - <type> ...)
        :precondition (and <atom>*)
        :effect (and <atom-or-not>*)) ...)

    (define (problem <name>)
      (:domain <name>)
      (:objects <name>+ - <type> ...)
      (:init <atom>*)
      (:goal (and <atom>*)))
"""

from __future__ import annotations

from dataclasses import dataclass

from kinder.taskplan.model import (
    Atom,
    Domain,
    OperatorSchema,
    Predicate,
    Problem,
)


class ParseError(Exception):
    """A syntax error with position and the expected-token set."""

    def __init__(self, message: str, line: int, col: int, expected: list[str] | None = None):
        self.line = line
        self.col = col
        self.expected = expected or []
        hint = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at line {line}, column {col}{hint}")


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
        elif ch in "()":
            tokens.append(_Token(ch, line, col))
            col += 1
            i += 1
        else:
            start = i
            start_col = col
            while i < len(text) and text[i] not in " \t\r\n();":
                i += 1
                col += 1
            tokens.append(_Token(text[start:i], line, start_col))
    return tokens


class _Node:
    """Either a token leaf or a parenthesized list with a position."""

    def __init__(self, items, line, col):
        self.items = items
        self.line = line
        self.col = col


def _parse_sexpr(tokens: list[_Token]) -> _Node:
    pos = 0

    def parse_one():
        nonlocal pos
        if pos >= len(tokens):
            last = tokens[-1] if tokens else _Token("", 1, 1)
            raise ParseError("unexpected end of input", last.line, last.col, ["(", "token"])
        tok = tokens[pos]
        if tok.text == "(":
            pos += 1
            items = []
            while True:
                if pos >= len(tokens):
                    raise ParseError(
                        "unclosed parenthesis", tok.line, tok.col, [")"]
                    )
                if tokens[pos].text == ")":
                    pos += 1
                    return _Node(items, tok.line, tok.col)
                items.append(parse_one())
        if tok.text == ")":
            raise ParseError("unexpected ')'", tok.line, tok.col, ["(", "token"])
        pos += 1
        return tok

    root = parse_one()
    if pos != len(tokens):
        extra = tokens[pos]
        raise ParseError("trailing input after expression", extra.line, extra.col, ["end of input"])
    if not isinstance(root, _Node):
        raise ParseError("expected a parenthesized form", root.line, root.col, ["("])
    return root


def _expect_symbol(node, what: str) -> _Token:
    if isinstance(node, _Node):
        raise ParseError(f"expected {what}", node.line, node.col, [what])
    return node


def _parse_typed_list(items, line, col) -> list[tuple[str, str]]:
    """Parse `n1 n2 - t1 n3 - t2` into [(n1, t1), (n2, t1), (n3, t2)]."""
    out: list[tuple[str, str]] = []
    pending: list[str] = []
    i = 0
    while i < len(items):
        tok = _expect_symbol(items[i], "name or '-'")
        if tok.text == "-":
            if i + 1 >= len(items):
                raise ParseError("missing type after '-'", tok.line, tok.col, ["type name"])
            type_tok = _expect_symbol(items[i + 1], "type name")
            if not pending:
                raise ParseError("no names before '-'", tok.line, tok.col, ["name"])
            out.extend((n, type_tok.text) for n in pending)
            pending = []
            i += 2
        else:
            pending.append(tok.text)
            i += 1
    if pending:
        raise ParseError("names without a type", line, col, ["- <type>"])
    return out


def _parse_atom(node) -> Atom:
    if not isinstance(node, _Node) or not node.items:
        where = node if isinstance(node, _Node) else node
        raise ParseError("expected an atom", where.line, where.col, ["(predicate args...)"])
    head = _expect_symbol(node.items[0], "predicate name")
    args = tuple(_expect_symbol(a, "argument").text for a in node.items[1:])
    return Atom(head.text, args)


def _parse_conjunction(node, allow_not: bool) -> tuple[frozenset[Atom], frozenset[Atom]]:
    """Parse `(and ...)` or a single atom; returns (positive, negated)."""
    if not isinstance(node, _Node) or not node.items:
        raise ParseError("expected a conjunction", node.line, node.col, ["(and ...)"])
    head = node.items[0]
    pos: set[Atom] = set()
    neg: set[Atom] = set()
    if not isinstance(head, _Node) and head.text == "and":
        parts = node.items[1:]
    else:
        parts = [node]
    for part in parts:
        if not isinstance(part, _Node) or not part.items:
            raise ParseError("expected an atom", node.line, node.col, ["(predicate ...)"])
        part_head = part.items[0]
        if not isinstance(part_head, _Node) and part_head.text == "not":
            if not allow_not:
                raise ParseError("negation not allowed here", part.line, part.col, ["positive atom"])
            if len(part.items) != 2:
                raise ParseError("malformed (not ...)", part.line, part.col, ["single atom"])
            neg.add(_parse_atom(part.items[1]))
        else:
            pos.add(_parse_atom(part))
    return frozenset(pos), frozenset(neg)


def parse_domain(text: str) -> Domain:
    """Parse a domain definition; raises ParseError with position info."""
    root = _parse_sexpr(_tokenize(text))
    items = root.items
    if not items or _expect_symbol(items[0], "'define'").text != "define":
        raise ParseError("expected (define ...)", root.line, root.col, ["define"])
    header = items[1]
    if (
        not isinstance(header, _Node)
        or len(header.items) != 2
        or _expect_symbol(header.items[0], "'domain'").text != "domain"
    ):
        raise ParseError("expected (domain <name>)", root.line, root.col, ["(domain <name>)"])
    name = _expect_symbol(header.items[1], "domain name").text

    types: tuple[str, ...] = ()
    predicates: list[Predicate] = []
    operators: list[OperatorSchema] = []
    for section in items[2:]:
        if not isinstance(section, _Node) or not section.items:
            raise ParseError("expected a section", root.line, root.col, [":types", ":predicates", ":action"])
        tag = _expect_symbol(section.items[0], "section tag").text
        if tag == ":types":
            types = tuple(_expect_symbol(t, "type name").text for t in section.items[1:])
        elif tag == ":predicates":
            for pnode in section.items[1:]:
                if not isinstance(pnode, _Node) or not pnode.items:
                    raise ParseError("expected a predicate", section.line, section.col, ["(name ?v - t ...)"])
                pname = _expect_symbol(pnode.items[0], "predicate name").text
                typed = _parse_typed_list(pnode.items[1:], pnode.line, pnode.col)
                predicates.append(Predicate(pname, tuple(t for _, t in typed)))
        elif tag == ":action":
            operators.append(_parse_action(section))
        else:
            raise ParseError(
                f"unknown section {tag!r}", section.line, section.col,
                [":types", ":predicates", ":action"],
            )
    return Domain(name, types, tuple(predicates), tuple(operators))


def _parse_action(section) -> OperatorSchema:
    items = section.items
    name = _expect_symbol(items[1], "action name").text
    fields: dict[str, object] = {}
    i = 2
    while i < len(items):
        key = _expect_symbol(items[i], "action keyword").text
        if key not in (":parameters", ":precondition", ":effect"):
            raise ParseError(
                f"unknown action field {key!r}", section.line, section.col,
                [":parameters", ":precondition", ":effect"],
            )
        if i + 1 >= len(items):
            raise ParseError(f"missing value for {key}", section.line, section.col, ["(...)"])
        fields[key] = items[i + 1]
        i += 2
    if ":parameters" not in fields:
        raise ParseError("action missing :parameters", section.line, section.col, [":parameters"])
    params_node = fields[":parameters"]
    if not isinstance(params_node, _Node):
        raise ParseError("expected parameter list", section.line, section.col, ["( ... )"])
    parameters = tuple(_parse_typed_list(params_node.items, params_node.line, params_node.col))
    pre, pre_neg = (
        _parse_conjunction(fields[":precondition"], allow_not=False)
        if ":precondition" in fields
        else (frozenset(), frozenset())
    )
    del pre_neg
    add, delete = (
        _parse_conjunction(fields[":effect"], allow_not=True)
        if ":effect" in fields
        else (frozenset(), frozenset())
    )
    return OperatorSchema(name, parameters, pre, add, delete)


def parse_problem(text: str, domain: Domain) -> Problem:
    """Parse a problem definition against a domain."""
    root = _parse_sexpr(_tokenize(text))
    items = root.items
    if not items or _expect_symbol(items[0], "'define'").text != "define":
        raise ParseError("expected (define ...)", root.line, root.col, ["define"])
    header = items[1]
    if (
        not isinstance(header, _Node)
        or len(header.items) != 2
        or _expect_symbol(header.items[0], "'problem'").text != "problem"
    ):
        raise ParseError("expected (problem <name>)", root.line, root.col, ["(problem <name>)"])
    name = _expect_symbol(header.items[1], "problem name").text

    domain_name = domain.name
    objects: tuple[tuple[str, str], ...] = ()
    init: frozenset[Atom] = frozenset()
    goal: frozenset[Atom] = frozenset()
    for section in items[2:]:
        if not isinstance(section, _Node) or not section.items:
            raise ParseError("expected a section", root.line, root.col, [":domain", ":objects", ":init", ":goal"])
        tag = _expect_symbol(section.items[0], "section tag").text
        if tag == ":domain":
            domain_name = _expect_symbol(section.items[1], "domain name").text
            if domain_name != domain.name:
                raise ParseError(
                    f"problem references domain {domain_name!r}, expected {domain.name!r}",
                    section.line, section.col, [domain.name],
                )
        elif tag == ":objects":
            objects = tuple(_parse_typed_list(section.items[1:], section.line, section.col))
        elif tag == ":init":
            init = frozenset(_parse_atom(a) for a in section.items[1:])
        elif tag == ":goal":
            if len(section.items) != 2:
                raise ParseError("expected a single goal form", section.line, section.col, ["(and ...)"])
            goal, neg = _parse_conjunction(section.items[1], allow_not=False)
            del neg
        else:
            raise ParseError(
                f"unknown section {tag!r}", section.line, section.col,
                [":domain", ":objects", ":init", ":goal"],
            )
    return Problem(name, domain_name, objects, init, goal)


def _typed_list_str(pairs) -> str:
    parts = []
    for name, type_name in pairs:
        parts.append(f"{name} - {type_name}")
    return " ".join(parts)


def domain_to_text(domain: Domain) -> str:
    """Serialize a domain; parse_domain round-trips this exactly."""
    lines = [f"(define (domain {domain.name})"]
    if domain.types:
        lines.append(f"  (:types {' '.join(domain.types)})")
    pred_strs = []
    for p in domain.predicates:
        args = " ".join(f"?v{i} - {t}" for i, t in enumerate(p.param_types))
        pred_strs.append(f"({p.name}{' ' + args if args else ''})")
    lines.append(f"  (:predicates {' '.join(pred_strs)})")
    for op in domain.operators:
        lines.append(f"  (:action {op.name}")
        lines.append(f"    :parameters ({_typed_list_str(op.parameters)})")
        pre = " ".join(str(a) for a in sorted(op.preconditions))
        lines.append(f"    :precondition (and {pre})")
        effs = [str(a) for a in sorted(op.add_effects)]
        effs.extend(f"(not {a})" for a in sorted(op.delete_effects))
        lines.append(f"    :effect (and {' '.join(effs)}))")
    lines.append(")")
    return "\n".join(lines) + "\n"


def problem_to_text(problem: Problem) -> str:
    """Serialize a problem; parse_problem round-trips this exactly."""
    lines = [f"(define (problem {problem.name})"]
    lines.append(f"  (:domain {problem.domain_name})")
    lines.append(f"  (:objects {_typed_list_str(problem.objects)})")
    init = " ".join(str(a) for a in sorted(problem.init))
    lines.append(f"  (:init {init})")
    goal = " ".join(str(a) for a in sorted(problem.goal))
    lines.append(f"  (:goal (and {goal}))")
    lines.append(")")
    return "\n".join(lines) + "\n"

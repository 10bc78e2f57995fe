"""Golden checks for documented external interfaces."""

from pathlib import Path

from kinder.symbols import env_model, skill_registry
from kinder.taskplan import domain_to_text, parse_domain

DOMAIN_DIR = Path(__file__).parent.parent / "docs" / "domains"

ENVS = (
    "Motion2D",
    "Obstruction2D",
    "ClutteredRetrieval2D",
    "ClutteredStorage2D",
    "PushPullHook2D",
    "StickButton2D",
)


def test_domain_files_match_registries():
    for name in ENVS:
        path = DOMAIN_DIR / f"{name.lower()}.kd-pddl"
        text = path.read_text(encoding="utf-8")
        assert text == domain_to_text(env_model(name).domain()), path
        parsed = parse_domain(text)
        assert set(parsed.operators) == {s.operator for s in skill_registry(name)}


def test_domain_files_round_trip():
    for name in ENVS:
        path = DOMAIN_DIR / f"{name.lower()}.kd-pddl"
        domain = parse_domain(path.read_text(encoding="utf-8"))
        assert parse_domain(domain_to_text(domain)) == domain

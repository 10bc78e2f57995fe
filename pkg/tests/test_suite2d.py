"""Tests for the six-environment suite: generation, goals, contact rules."""

import math

import numpy as np
import pytest

from kinder.envcore import ActionDelta, object_shape, robot_config
from kinder.geom2d import Circle, PlacedShape, Pose2, collides
from kinder.state import state_to_json
from kinder.suite2d import (
    BadVariant,
    certify_feasible,
    generate,
    make_env,
    parse_variant,
)
from kinder.suite2d.obstruction2d import is_on
from kinder.suite2d.stickbutton2d import barrier_bottom, base_max_y, direct_reach

ALL_VARIANTS = [
    "Motion2D-p0",
    "Motion2D-p1",
    "Obstruction2D-o0",
    "Obstruction2D-o2",
    "ClutteredRetrieval2D-o1",
    "ClutteredRetrieval2D-o4",
    "ClutteredStorage2D-b1",
    "ClutteredStorage2D-b3",
    "PushPullHook2D-o0",
    "StickButton2D-b1",
    "StickButton2D-b3",
]


def test_variant_grammar():
    v = parse_variant("StickButton2D-b5")
    assert v.env == "StickButton2D"
    assert v.letter == "b"
    assert v.count == 5
    assert str(v) == "StickButton2D-b5"
    with pytest.raises(BadVariant):
        parse_variant("Motion2D-z9")
    with pytest.raises(BadVariant):
        parse_variant("motion2d-p0")
    with pytest.raises(BadVariant):
        parse_variant("Motion2D-p")
    with pytest.raises(BadVariant):
        parse_variant("Bogus2D-p0")
    with pytest.raises(BadVariant):
        parse_variant("PushPullHook2D-o2")


def test_reset_determinism_and_difference():
    a = generate("Motion2D-p0", 7)
    b = generate("Motion2D-p0", 7)
    c = generate("Motion2D-p0", 8)
    assert state_to_json(a) == state_to_json(b)
    assert not np.allclose(a.features("target_region"), c.features("target_region"))


@pytest.mark.parametrize("variant", ALL_VARIANTS)
def test_generation_feasible_and_collision_free(variant):
    env = make_env(variant)
    for seed in range(25):
        state = env.reset(seed)
        assert certify_feasible(state, variant)
        assert not env.config_collides(state, robot_config(state))
        # Movable objects must not start interpenetrating one another.
        movables = [
            n for n, t, _ in state.objects if t.name in ("block", "hook")
        ]
        for i, a in enumerate(movables):
            for b in movables[i + 1:]:
                assert not collides(
                    object_shape(state, a), object_shape(state, b), 1e-6
                )


def test_variant_count_matches_objects():
    counted_prefix = {
        "Motion2D": "passage",
        "Obstruction2D": "obstruction",
        "ClutteredRetrieval2D": "obstruction",
        "ClutteredStorage2D": "block",
        "StickButton2D": "button",
    }
    for variant in ALL_VARIANTS:
        spec = parse_variant(variant)
        if spec.env == "PushPullHook2D":
            continue
        prefix = counted_prefix[spec.env]
        state = generate(variant, 13)
        if spec.env == "Motion2D":
            names = {n.rsplit("_", 1)[0] for n in state.names if n.startswith(prefix)}
        else:
            names = [n for n in state.names if n.startswith(prefix)]
        assert len(names) == spec.count, variant


def test_motion2d_p0_has_no_interior_walls():
    state = generate("Motion2D-p0", 21)
    walls = [n for n, t, _ in state.objects if t.name == "wall"]
    assert sorted(walls) == ["wall_bottom", "wall_left", "wall_right", "wall_top"]


def test_motion2d_goal():
    env = make_env("Motion2D-p0")
    state = env.reset(3)
    assert not env.check_goal(state)
    inside = state.with_updates(
        {"robot": {"x": state.get("target_region", "x"),
                   "y": state.get("target_region", "y")}}
    )
    assert env.check_goal(inside)


def test_obstruction2d_on_tolerance():
    env = make_env("Obstruction2D-o0")
    state = env.reset(5)
    surf_top = state.get("target_surface", "y") + state.get("target_surface", "half_h")
    sx = state.get("target_surface", "x")
    hh = state.get("target_block", "half_h")
    on = state.with_updates(
        {"target_block": {"x": sx, "y": surf_top + hh + 5e-5, "theta": 0.0}}
    )
    assert is_on(on, "target_block", "target_surface")
    assert env.check_goal(on)
    hover = state.with_updates(
        {"target_block": {"x": sx, "y": surf_top + hh + 5e-4, "theta": 0.0}}
    )
    assert not is_on(hover, "target_block", "target_surface")
    overhang = state.with_updates(
        {"target_block": {"x": sx + state.get("target_surface", "half_w"),
                          "y": surf_top + hh + 5e-5, "theta": 0.0}}
    )
    assert not is_on(overhang, "target_block", "target_surface")


def test_stickbutton_press_latches_monotone():
    env = make_env("StickButton2D-b1")
    state = env.reset(2)
    assert not env.check_goal(state)
    # Teleport the stick (held) right below the button and nudge into it.
    bx = state.get("button0", "x")
    by = state.get("button0", "y")
    held = state.with_updates(
        {
            "stick": {"x": bx, "y": by - state.get("button0", "radius")
                      - state.get("stick", "half_h") - 2e-3, "theta": 0.0},
        },
        held=frozenset({"stick"}),
    ).with_updates({"stick": {"held": 1.0}, "robot": {"vac_on": 1.0}})
    env.set_state(held)
    out = env.step(ActionDelta(0.0, 0.2, 0.0, 0.0, 0.0))
    assert out.state.get("button0", "pressed") == 1.0
    assert out.terminated
    # Latched: moving away keeps it pressed.
    env.set_state(out.state.with_updates({}, held=out.state.held))
    out2 = env.step(ActionDelta(0.0, -1.0, 0.0, 0.0, 0.0))
    assert out2.state.get("button0", "pressed") == 1.0


def test_stickbutton_far_button_out_of_direct_reach():
    for seed in range(10):
        state = generate("StickButton2D-b1", seed)
        by = state.get("button0", "y")
        assert by > barrier_bottom(state)
        assert by - base_max_y(state) > direct_reach(state)


def test_stickbutton_barrier_blocks_base_not_stick():
    env = make_env("StickButton2D-b1")
    state = env.reset(4)
    bar_y = state.get("barrier", "y")
    # Base just below the barrier: moving up must revert.
    below = state.with_updates(
        {"robot": {"x": 5.0, "y": barrier_bottom(state)
                   - state.get("robot", "base_radius") - 1e-3, "theta": math.pi / 2}}
    )
    env.set_state(below)
    out = env.step(ActionDelta(0.0, 1.0, 0.0, 0.0, 0.0))
    assert out.info["reverted"]
    # A held stick straddling the barrier line is fine.
    held = below.with_updates(
        {"stick": {"x": 5.0, "y": bar_y, "theta": math.pi / 2, "held": 1.0},
         "robot": {"vac_on": 1.0}},
        held=frozenset({"stick"}),
    )
    env.set_state(held)
    out = env.step(ActionDelta(1.0, 0.0, 0.0, 0.0, 0.0))
    assert not out.info["reverted"]


def test_pushpullhook_quasistatic_push():
    env = make_env("PushPullHook2D-o0")
    state = env.reset(1)
    # Place the held hook so its shaft is just left of the movable button.
    mx = state.get("movable_button", "x")
    my = state.get("movable_button", "y")
    radius = state.get("movable_button", "radius")
    shaft = state.get("hook", "shaft_half_len")
    staged = state.with_updates(
        {
            "hook": {"x": mx - radius - state.get("hook", "half_thick") - 1e-3,
                     "y": my - shaft, "theta": math.pi / 2, "held": 1.0},
            "robot": {"x": mx - radius - 1.2, "y": my - shaft, "theta": 0.0,
                      "vac_on": 1.0},
        },
        held=frozenset({"hook"}),
    )
    env.set_state(staged)
    moved = 0.0
    for _ in range(40):
        out = env.step(ActionDelta(1.0, 0.0, 0.0, 0.0, 0.0))
        assert not out.info["reverted"]
        moved = out.state.get("movable_button", "x") - mx
    assert moved > 0.05
    # Per-step displacement never exceeds the commanded displacement + slack.
    env2 = make_env("PushPullHook2D-o0")
    env2.set_state(staged)
    prev = staged
    for _ in range(40):
        out = env2.step(ActionDelta(1.0, 0.0, 0.0, 0.0, 0.0))
        db = math.hypot(
            out.state.get("movable_button", "x") - prev.get("movable_button", "x"),
            out.state.get("movable_button", "y") - prev.get("movable_button", "y"),
        )
        assert db <= env2.robot_spec.max_dx + 1e-6
        prev = out.state


def test_pushpullhook_moving_away_leaves_button():
    env = make_env("PushPullHook2D-o0")
    state = env.reset(3)
    mx = state.get("movable_button", "x")
    my = state.get("movable_button", "y")
    staged = state.with_updates(
        {
            "hook": {"x": mx - 1.0, "y": my, "theta": 0.0, "held": 1.0},
            "robot": {"x": mx - 2.5, "y": my, "theta": 0.0, "vac_on": 1.0},
        },
        held=frozenset({"hook"}),
    )
    env.set_state(staged)
    out = env.step(ActionDelta(-1.0, 0.0, 0.0, 0.0, 0.0))
    assert out.state.get("movable_button", "x") == mx
    assert out.state.get("movable_button", "y") == my


def test_pushpullhook_push_into_wall_reverts():
    env = make_env("PushPullHook2D-o0")
    state = env.reset(2)
    radius = state.get("movable_button", "radius")
    thick = state.get("hook", "half_thick")
    shaft = state.get("hook", "shaft_half_len")
    # Button hard against the left wall, hook pushing further left.
    staged = state.with_updates(
        {
            "movable_button": {"x": radius + 5e-4, "y": 5.0},
            "hook": {"x": 2 * radius + thick + 1.5e-3, "y": 5.0 - shaft,
                     "theta": math.pi / 2, "held": 1.0},
            "robot": {"x": 2 * radius + 1.3, "y": 5.0 - shaft, "theta": math.pi,
                      "vac_on": 1.0},
        },
        held=frozenset({"hook"}),
    )
    env.set_state(staged)
    out = env.step(ActionDelta(-1.0, 0.0, 0.0, 0.0, 0.0))
    assert out.info["reverted"]
    assert out.state.get("movable_button", "x") == radius + 5e-4


def test_pressed_features_monotone_random_walk():
    env = make_env("StickButton2D-b3")
    env.reset(0)
    rng = np.random.default_rng(0)
    pressed = np.zeros(3)
    for _ in range(150):
        out = env.step(ActionDelta.from_array(rng.uniform(-1, 1, 5)))
        now = np.array([out.state.get(f"button{i}", "pressed") for i in range(3)])
        assert np.all(now >= pressed)
        pressed = now


@pytest.mark.parametrize("variant", [
    "Motion2D-p1", "Obstruction2D-o1", "ClutteredRetrieval2D-o2",
    "ClutteredStorage2D-b2", "PushPullHook2D-o0", "StickButton2D-b2",
])
def test_thousand_generations_clean_and_feasible(variant):
    """1,000 seeded generations: no initial penetration, all certified."""
    env = make_env(variant)
    for seed in range(1000):
        state = env.reset(seed)
        assert certify_feasible(state, variant)
        assert not env.config_collides(state, robot_config(state))
        movables = [n for n, t, _ in state.objects if t.name in ("block", "hook")]
        for i, a in enumerate(movables):
            for b in movables[i + 1:]:
                assert not collides(
                    object_shape(state, a), object_shape(state, b), 1e-6
                )

"""Language-model planner: plan parsing, transports, open-loop execution."""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np

from kinder.envcore import ActionDelta, KinematicEnv
from kinder.state import SceneState
from kinder.symbols import InitiationFailed, SkillDef, env_model, execute_option
from kinder.baselines.prompts import build_prompt

DEFAULT_MODEL_ID = "chat-default"


@dataclass(frozen=True)
class LlmPlanRequest:
    """A chat-completion style request."""

    prompt: str
    model: str = DEFAULT_MODEL_ID
    temperature: float = 0.0

    def payload(self) -> dict:
        return {
            "model": self.model,
            "messages": [{"role": "user", "content": self.prompt}],
            "temperature": self.temperature,
        }


@dataclass(frozen=True)
class PlanStep:
    skill: str
    objects: tuple[tuple[str, str], ...]
    params: tuple[float, ...]


@dataclass
class ParseOutcome:
    """Parsed plan or per-line diagnostics that failed it."""

    steps: list[PlanStep] | None
    diagnostics: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.steps is not None


class TransportError(Exception):
    """Transport failure; carries the raw exchange when available."""

    def __init__(self, message: str, exchange: dict | None = None):
        super().__init__(message)
        self.exchange = exchange or {}


class Transport(Protocol):
    def complete(self, request: LlmPlanRequest) -> str: ...


class ScriptedTransport:
    """Returns canned responses in order; for unit tests."""

    def __init__(self, responses: list[str]):
        self._responses = list(responses)
        self.requests: list[LlmPlanRequest] = []

    def complete(self, request: LlmPlanRequest) -> str:
        self.requests.append(request)
        if not self._responses:
            raise TransportError("scripted transport exhausted")
        return self._responses.pop(0)


class HttpChatTransport:
    """POSTs a chat-completion payload to the endpoint in the environment.

    Reads KINDER_LLM_URL and (optionally) KINDER_LLM_KEY.
    """

    def __init__(self, url: str | None = None, api_key: str | None = None,
                 timeout: float = 120.0):
        self.url = url or os.environ.get("KINDER_LLM_URL", "")
        self.api_key = api_key or os.environ.get("KINDER_LLM_KEY", "")
        self.timeout = timeout

    def complete(self, request: LlmPlanRequest) -> str:
        import httpx

        if not self.url:
            raise TransportError("no endpoint configured (KINDER_LLM_URL)")
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = httpx.post(
                self.url, json=request.payload(), headers=headers,
                timeout=self.timeout,
            )
            resp.raise_for_status()
            data = resp.json()
            return data["choices"][0]["message"]["content"]
        except Exception as err:
            raise TransportError(
                f"chat endpoint failure: {err}",
                exchange={"request": request.payload()},
            ) from err


class CassetteTransport:
    """Record/replay transport backed by a JSONL cassette file.

    Each line stores {"request": payload, "response": text}. In replay mode
    a request must match a recorded payload exactly; in record mode misses
    are forwarded to the live transport and appended.
    """

    def __init__(self, path: str | Path, live: Transport | None = None):
        self.path = Path(path)
        self.live = live
        self._entries: list[dict] = []
        if self.path.exists():
            with open(self.path, "r", encoding="utf-8") as fh:
                self._entries = [json.loads(line) for line in fh if line.strip()]

    def complete(self, request: LlmPlanRequest) -> str:
        payload = request.payload()
        for entry in self._entries:
            if entry["request"] == payload:
                return entry["response"]
        if self.live is None:
            raise TransportError(
                "no cassette entry matches the request",
                exchange={"request": payload},
            )
        response = self.live.complete(request)
        entry = {"request": payload, "response": response}
        self._entries.append(entry)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry) + "\n")
        return response


_STEP_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\((.*?)\)\[(.*?)\]\s*$")


def parse_plan(text: str, skills: list[SkillDef] | None = None) -> ParseOutcome:
    """Parse the last `Plan:` block into steps, or report diagnostics."""
    lines = text.splitlines()
    plan_starts = [i for i, line in enumerate(lines) if line.strip() == "Plan:"]
    if not plan_starts:
        return ParseOutcome(None, ["NoPlanBlock: no 'Plan:' line found"])
    start = plan_starts[-1] + 1
    by_name = {s.name: s for s in (skills or [])}
    steps: list[PlanStep] = []
    diagnostics: list[str] = []
    for offset, raw in enumerate(lines[start:]):
        line_no = start + offset + 1
        line = raw.strip()
        if not line:
            continue
        m = _STEP_RE.match(line)
        if m is None:
            diagnostics.append(
                f"LineParseError(line {line_no}): not of the form name(obj:type, ...)[v, ...]"
            )
            continue
        name, obj_text, param_text = m.group(1), m.group(2), m.group(3)
        objects: list[tuple[str, str]] = []
        ok = True
        for part in filter(None, (p.strip() for p in obj_text.split(","))):
            if ":" not in part:
                diagnostics.append(
                    f"LineParseError(line {line_no}): argument {part!r} missing ':type'"
                )
                ok = False
                break
            obj_name, obj_type = part.split(":", 1)
            objects.append((obj_name.strip(), obj_type.strip()))
        if not ok:
            continue
        params: list[float] = []
        for part in filter(None, (p.strip() for p in param_text.split(","))):
            try:
                params.append(float(part))
            except ValueError:
                diagnostics.append(
                    f"LineParseError(line {line_no}): bad parameter {part!r}"
                )
                ok = False
                break
        if not ok:
            continue
        if skills is not None:
            if name not in by_name:
                diagnostics.append(
                    f"LineParseError(line {line_no}): unknown skill {name!r}"
                )
                continue
            skill = by_name[name]
            if len(objects) != len(skill.object_types):
                diagnostics.append(
                    f"LineParseError(line {line_no}): {name} expects "
                    f"{len(skill.object_types)} objects, got {len(objects)}"
                )
                continue
            if len(params) != len(skill.param_bounds):
                diagnostics.append(
                    f"LineParseError(line {line_no}): {name} expects "
                    f"{len(skill.param_bounds)} params, got {len(params)}"
                )
                continue
        steps.append(PlanStep(name, tuple(objects), tuple(params)))
    if diagnostics:
        return ParseOutcome(None, diagnostics)
    return ParseOutcome(steps)


# Small canned example plans for the in-context prompt variant.
IN_CONTEXT_EXAMPLES: dict[str, list[str]] = {
    "Motion2D": [
        "Goal: (and (InRegion robot target_region))\nPlan:\nMoveTo(robot:robot, target_region:region)[0.0, 0.0]",
        "Goal: (and (InRegion robot target_region))\nPlan:\nMoveTo(robot:robot, target_region:region)[-0.25, 0.4]",
    ],
    "Obstruction2D": [
        "Goal: (and (On target_block target_surface))\nPlan:\nPick(robot:robot, target_block:block, ground:region)[0.37]\nPlace(robot:robot, target_block:block, target_surface:region)[0.0]",
        "Goal: (and (On target_block target_surface))\nPlan:\nPick(robot:robot, obstruction0:block, target_surface:region)[0.4]\nPlace(robot:robot, obstruction0:block, ground:region)[-0.6]\nPick(robot:robot, target_block:block, ground:region)[0.37]\nPlace(robot:robot, target_block:block, target_surface:region)[0.1]",
    ],
    "ClutteredRetrieval2D": [
        "Goal: (and (Inside target_block goal_region))\nPlan:\nPick(robot:robot, target_block:block)[0.2]\nPlace(robot:robot, target_block:block, goal_region:region)[0.0, 0.0]",
        "Goal: (and (Inside target_block goal_region))\nPlan:\nPick(robot:robot, obstruction0:block)[0.6]\nPlace(robot:robot, obstruction0:block, goal_region:region)[-0.7, -0.7]\nPick(robot:robot, target_block:block)[0.2]\nPlace(robot:robot, target_block:block, goal_region:region)[0.3, 0.3]",
    ],
    "ClutteredStorage2D": [
        "Goal: (and (Inside block0 shelf_region))\nPlan:\nPick(robot:robot, block0:block)[0.1]\nPlace(robot:robot, block0:block, shelf_region:region)[0.0, 0.0]",
        "Goal: (and (Inside block0 shelf_region) (Inside block1 shelf_region))\nPlan:\nPick(robot:robot, block0:block)[0.1]\nPlace(robot:robot, block0:block, shelf_region:region)[-0.5, -0.5]\nPick(robot:robot, block1:block)[0.8]\nPlace(robot:robot, block1:block, shelf_region:region)[0.5, 0.5]",
    ],
    "PushPullHook2D": [
        "Goal: (and (AtTarget movable_button target_button))\nPlan:\nPickHook(robot:robot, hook:hook)[0.3]\nPushButtonWithHook(robot:robot, movable_button:button, target_button:button, hook:hook)[0.0]",
        "Goal: (and (AtTarget movable_button target_button))\nPlan:\nPickHook(robot:robot, hook:hook)[0.75]\nPushButtonWithHook(robot:robot, movable_button:button, target_button:button, hook:hook)[-0.4]",
    ],
    "StickButton2D": [
        "Goal: (and (Pressed button0))\nPlan:\nPickStick(robot:robot, stick:block)[0.01]\nPressWithStick(robot:robot, button0:button, stick:block)[1.5708]",
        "Goal: (and (Pressed button0) (Pressed button1))\nPlan:\nPickStick(robot:robot, stick:block)[0.01]\nPressWithStick(robot:robot, button0:button, stick:block)[1.5708]\nPressWithStick(robot:robot, button1:button, stick:block)[1.2]",
    ],
}


@dataclass
class LlmSolveInfo:
    """Diagnostics from one planner request."""

    prompt: str = ""
    response: str = ""
    diagnostics: list[str] = field(default_factory=list)
    executed_steps: int = 0


def llm_solve(
    env: KinematicEnv,
    state: SceneState,
    transport: Transport,
    mode: str = "zero_shot",
    seed: int = 0,
    model_id: str = DEFAULT_MODEL_ID,
    temperature: float = 0.0,
    examples: list[str] | None = None,
) -> tuple[list[ActionDelta] | None, LlmSolveInfo]:
    """One request per episode, parsed and rolled out open-loop on a clone."""
    model = env_model(env.env_name)
    skills = list(model.skills)
    if mode == "in_context" and examples is None:
        examples = IN_CONTEXT_EXAMPLES.get(env.env_name, [])[:2]
    info = LlmSolveInfo()
    info.prompt = build_prompt(env, state, skills, mode, examples)
    request = LlmPlanRequest(info.prompt, model=model_id, temperature=temperature)
    info.response = transport.complete(request)
    outcome = parse_plan(info.response, skills)
    if not outcome.ok:
        info.diagnostics = outcome.diagnostics
        return None, info
    by_name = {s.name: s for s in skills}
    sim = env.clone()
    sim.set_state(state)
    actions: list[ActionDelta] = []
    rng = np.random.default_rng(np.uint64(seed))
    for step in outcome.steps:
        skill = by_name[step.skill]
        objects = tuple(name for name, _ in step.objects)
        try:
            acts, _, ok = execute_option(
                sim, skill, objects, np.array(step.params), seed=int(rng.integers(2**31)),
            )
        except InitiationFailed as err:
            info.diagnostics.append(f"InitiationFailed: {err}")
            return None, info
        except KeyError as err:
            info.diagnostics.append(f"UnknownObject: {err}")
            return None, info
        actions.extend(acts)
        info.executed_steps += 1
        if not ok:
            # Open-loop: keep rolling out the remaining skills.
            continue
    return actions, info

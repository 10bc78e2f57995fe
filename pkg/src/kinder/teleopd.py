"""Teleoperation server: live sessions over a websocket, frames at a fixed tick.

Each connection drives one session. Messages are newline-delimited JSON (one
object per websocket text message), all carrying a `v: 1` schema field.
"""

from __future__ import annotations

import asyncio
import json
import mimetypes
import time
from dataclasses import dataclass, field
from http import HTTPStatus
from pathlib import Path

import numpy as np
from websockets.asyncio.server import serve
from websockets.datastructures import Headers
from websockets.exceptions import ConnectionClosed
from websockets.http11 import Response

from kinder.demos import DEMO_SUFFIX, DemoRecord, write_demo
from kinder.envcore import ActionDelta, object_shape
from kinder.state import SceneState, state_to_json
from kinder.suite2d import BadVariant, make_env, parse_variant

PROTOCOL_VERSION = 1
DEFAULT_PORT = 8753
DEFAULT_TICK_RATE = 20.0


@dataclass
class SessionInput:
    """Level-held input: the latest message wins until replaced."""

    axes: tuple[float, float, float] = (0.0, 0.0, 0.0)
    arm: int = 0
    vacuum: str | None = None

    def to_action(self) -> ActionDelta:
        vac = 0.0
        if self.vacuum == "on":
            vac = 1.0
        elif self.vacuum == "off":
            vac = -1.0
        return ActionDelta(
            self.axes[0], self.axes[1], self.axes[2], float(self.arm), vac
        )


@dataclass
class Session:
    """One live environment instance driven by one client."""

    session_id: int
    variant: str
    seed: int
    env: object
    tick: int = 0
    steps: int = 0
    done: bool = False
    reward_sum: float = 0.0
    input: SessionInput = field(default_factory=SessionInput)
    recording: list[ActionDelta] = field(default_factory=list)
    last_message_time: float = field(default_factory=time.monotonic)


def shape_descriptors(state: SceneState) -> dict:
    """Per-object drawing descriptors {kind, dims, color} for the client."""
    out = {}
    for name, otype, vec in state.objects:
        if otype.name == "robot":
            continue
        color = [float(vec[otype.index(c)]) for c in ("r", "g", "b")]
        shape = object_shape(state, name)
        if otype.name == "button":
            out[name] = {"kind": "circle", "dims": [float(vec[2])], "color": color}
        elif otype.name == "hook":
            parts = []
            from kinder.geom2d import placed_parts

            pose = shape.pose
            for part, world in placed_parts(shape):
                local = pose.inverse().compose(world)
                parts.append({
                    "half_w": part.half_w, "half_h": part.half_h,
                    "dx": local.x, "dy": local.y, "dtheta": local.theta,
                })
            out[name] = {"kind": "compound", "dims": parts, "color": color}
        else:
            out[name] = {
                "kind": "rect",
                "dims": [float(vec[otype.index("half_w")]), float(vec[otype.index("half_h")])],
                "color": color,
            }
        out[name]["solid"] = otype.name in ("wall", "block", "hook", "barrier")
    return out


class TeleopServer:
    """Hosts sessions; one duplex websocket per session."""

    def __init__(
        self,
        host: str = "127.0.0.1",
        port: int = DEFAULT_PORT,
        static_dir: str | None = None,
        tick_rate: float = DEFAULT_TICK_RATE,
        idle_timeout: float = 60.0,
        demo_dir: str = ".",
    ) -> None:
        self.host = host
        self.port = port
        self.static_dir = Path(static_dir) if static_dir else None
        self.tick_rate = tick_rate
        self.idle_timeout = idle_timeout
        self.demo_dir = Path(demo_dir)
        self._next_id = 0
        self._rng = np.random.default_rng()

    # Message helpers --------------------------------------------------------

    @staticmethod
    def _msg(msg_type: str, **fields) -> str:
        payload = {"v": PROTOCOL_VERSION, "type": msg_type}
        payload.update(fields)
        return json.dumps(payload) + "\n"

    def _frame(self, session: Session) -> str:
        state = session.env.state
        return self._msg(
            "frame",
            tick=session.tick,
            scene=json.loads(state_to_json(state)),
            shapes=shape_descriptors(state),
            reward=-1.0 if session.steps else 0.0,
            done=session.done,
            steps=session.steps,
        )

    # Session logic ----------------------------------------------------------

    def _create_session(self, variant: str, seed: int | None) -> Session:
        spec = parse_variant(variant)
        env = make_env(spec)
        if seed is None:
            seed = int(self._rng.integers(0, 2**63 - 1))
        env.reset(seed)
        self._next_id += 1
        return Session(self._next_id, variant, seed, env)

    def _apply_tick(self, session: Session) -> None:
        session.tick += 1
        if session.done:
            return
        action = session.input.to_action()
        out = session.env.step(action)
        session.recording.append(action)
        session.steps += 1
        session.reward_sum += out.reward
        if out.terminated:
            session.done = True

    def _save(self, session: Session) -> Path:
        demo = DemoRecord(
            env=session.env.env_name,
            variant=session.variant,
            reset_seed=session.seed,
            source="teleop",
            created_at=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            steps=tuple(session.recording),
            terminal_success=session.done,
        )
        self.demo_dir.mkdir(parents=True, exist_ok=True)
        path = self.demo_dir / (
            f"teleop-{session.variant}-seed{session.seed}-{session.session_id}{DEMO_SUFFIX}"
        )
        return write_demo(demo, path)

    async def _handler(self, connection) -> None:
        session: Session | None = None
        send_lock = asyncio.Lock()

        async def send(text: str) -> None:
            async with send_lock:
                await connection.send(text)

        async def tick_loop() -> None:
            assert session is not None
            try:
                while True:
                    await asyncio.sleep(1.0 / self.tick_rate)
                    if time.monotonic() - session.last_message_time > self.idle_timeout:
                        await connection.close(code=1000, reason="idle timeout")
                        return
                    self._apply_tick(session)
                    await send(self._frame(session))
            except (ConnectionClosed, asyncio.CancelledError):
                return

        ticker: asyncio.Task | None = None
        try:
            async for raw in connection:
                if isinstance(raw, bytes):
                    raw = raw.decode("utf-8", errors="replace")
                for line in filter(None, (l.strip() for l in raw.splitlines())):
                    try:
                        msg = json.loads(line)
                    except json.JSONDecodeError:
                        await send(self._msg("error", code="bad_json",
                                             message="unparseable message"))
                        continue
                    if session is not None:
                        session.last_message_time = time.monotonic()
                    msg_type = msg.get("type")
                    if msg_type == "create":
                        if session is not None:
                            await send(self._msg("error", code="already_created",
                                                 message="session exists"))
                            continue
                        try:
                            session = self._create_session(
                                msg.get("variant", ""), msg.get("seed")
                            )
                        except BadVariant as err:
                            await send(self._msg("error", code="bad_variant",
                                                 message=str(err)))
                            continue
                        await send(self._msg(
                            "created", session_id=session.session_id,
                            variant=session.variant, seed=session.seed,
                        ))
                        await send(self._frame(session))
                        ticker = asyncio.create_task(tick_loop())
                    elif session is None:
                        await send(self._msg("error", code="no_session",
                                             message="create a session first"))
                    elif msg_type == "input":
                        axes = msg.get("axes", [0.0, 0.0, 0.0])
                        session.input = SessionInput(
                            axes=(float(axes[0]), float(axes[1]), float(axes[2])),
                            arm=int(msg.get("arm", 0)),
                            vacuum=msg.get("vacuum"),
                        )
                    elif msg_type == "reset":
                        seed = msg.get("seed")
                        if seed is None:
                            seed = int(self._rng.integers(0, 2**63 - 1))
                        session.seed = int(seed)
                        session.env.reset(session.seed)
                        session.steps = 0
                        session.done = False
                        session.reward_sum = 0.0
                        session.recording = []
                        session.input = SessionInput()
                        await send(self._frame(session))
                    elif msg_type == "save":
                        path = self._save(session)
                        await send(self._msg("saved", path=str(path)))
                    else:
                        await send(self._msg("error", code="unknown_type",
                                             message=f"unknown tag {msg_type!r}"))
        except ConnectionClosed:
            pass
        finally:
            if ticker is not None:
                ticker.cancel()

    def _process_request(self, connection, request) -> Response | None:
        if "Upgrade" in request.headers:
            return None
        if self.static_dir is None:
            return Response(
                HTTPStatus.NOT_FOUND, "Not Found", Headers(), b"no static dir\n"
            )
        rel = request.path.lstrip("/") or "index.html"
        target = (self.static_dir / rel).resolve()
        if not str(target).startswith(str(self.static_dir.resolve())) or not target.is_file():
            return Response(HTTPStatus.NOT_FOUND, "Not Found", Headers(), b"not found\n")
        ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        headers = Headers()
        headers["Content-Type"] = ctype
        return Response(HTTPStatus.OK, "OK", headers, target.read_bytes())

    async def serve_forever(self) -> None:
        async with serve(
            self._handler, self.host, self.port,
            process_request=self._process_request,
        ) as server:
            await server.serve_forever()

    async def start(self):
        """Start and return the server object (for tests)."""
        return await serve(
            self._handler, self.host, self.port,
            process_request=self._process_request,
        )


def run(host: str = "127.0.0.1", port: int = DEFAULT_PORT,
        static_dir: str | None = None, tick_rate: float = DEFAULT_TICK_RATE,
        demo_dir: str = ".") -> None:
    """Blocking entry point for the CLI."""
    server = TeleopServer(
        host=host, port=port, static_dir=static_dir, tick_rate=tick_rate,
        demo_dir=demo_dir,
    )
    asyncio.run(server.serve_forever())

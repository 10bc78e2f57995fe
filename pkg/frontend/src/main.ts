// Single-page teleop UI: canvas view, joystick pad, rotation ring, HUD.

import { TeleopClient } from "./client.js";
import { Joystick, ringToTheta } from "./joystick.js";
import { INITIAL_KEYS, KeyState, keyEvent, vacuumField } from "./keys.js";
import { FrameMessage, InputState } from "./protocol.js";
import { renderFrame } from "./render.js";

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const hud = document.getElementById("hud")!;
const banner = document.getElementById("banner")!;
const pad = document.getElementById("pad") as HTMLCanvasElement;
const ring = document.getElementById("ring") as HTMLCanvasElement;
const variantInput = document.getElementById("variant") as HTMLInputElement;
const connectButton = document.getElementById("connect") as HTMLButtonElement;

const PAD_RADIUS = 60;
const joystick = new Joystick(PAD_RADIUS);
let keys: KeyState = INITIAL_KEYS;
let ringStart: number | null = null;
let ringTheta = 0;
let lastFrame: FrameMessage | null = null;
let inputResetPending = false;

let client: TeleopClient | null = null;

function currentInput(): InputState {
  const [ux, uy] = joystick.axes();
  return { axes: [ux, uy, ringTheta], arm: keys.arm, vacuum: vacuumField(keys) };
}

function pushInput(): void {
  client?.setInput(currentInput());
}

function showBanner(text: string): void {
  banner.textContent = text;
  banner.classList.remove("hidden");
  setTimeout(() => banner.classList.add("hidden"), 2500);
}

function connect(): void {
  client?.close();
  const url = `ws://${location.host || "127.0.0.1:8753"}/`;
  client = new TeleopClient(url, {
    onFrame: (frame) => {
      lastFrame = frame;
      if (inputResetPending && frame.steps === 0) {
        // Input state resets with the episode.
        keys = INITIAL_KEYS;
        ringTheta = 0;
        joystick.release();
        inputResetPending = false;
        pushInput();
      }
      renderFrame(ctx, frame, canvas.width, canvas.height);
      hud.textContent =
        `steps ${frame.steps}  reward ${-frame.steps}  ` +
        (frame.done ? "DONE - press R to reset, Enter to save" : "running");
    },
    onCreated: (_id, variant, seed) => showBanner(`session ${variant} seed ${seed}`),
    onSaved: (path) => showBanner(`saved ${path}`),
    onError: (code, message) => showBanner(`error ${code}: ${message}`),
    onStatus: (status) => {
      if (status !== "open") hud.textContent = status;
    },
  });
  client.connect(variantInput.value.trim() || "Motion2D-p0");
}

connectButton.addEventListener("click", connect);

window.addEventListener("keydown", (event) => {
  const { state, command } = keyEvent(keys, "down", event.key);
  keys = state;
  if (command === "reset") {
    inputResetPending = true;
    client?.reset();
  } else if (command === "save") {
    client?.save();
  }
  pushInput();
});
window.addEventListener("keyup", (event) => {
  keys = keyEvent(keys, "up", event.key).state;
  pushInput();
});

function bindPad(): void {
  const rect = () => pad.getBoundingClientRect();
  pad.addEventListener("pointerdown", (e) => {
    pad.setPointerCapture(e.pointerId);
    joystick.start(e.clientX - rect().left, e.clientY - rect().top);
    pushInput();
  });
  pad.addEventListener("pointermove", (e) => {
    joystick.move(e.clientX - rect().left, e.clientY - rect().top);
    pushInput();
    drawPad();
  });
  const end = () => {
    joystick.release();
    pushInput();
    drawPad();
  };
  pad.addEventListener("pointerup", end);
  pad.addEventListener("pointercancel", end);
}

function bindRing(): void {
  const center = () => {
    const r = ring.getBoundingClientRect();
    return { x: r.left + r.width / 2, y: r.top + r.height / 2 };
  };
  ring.addEventListener("pointerdown", (e) => {
    ring.setPointerCapture(e.pointerId);
    const c = center();
    ringStart = Math.atan2(-(e.clientY - c.y), e.clientX - c.x);
  });
  ring.addEventListener("pointermove", (e) => {
    if (ringStart === null) return;
    const c = center();
    const angle = Math.atan2(-(e.clientY - c.y), e.clientX - c.x);
    ringTheta = ringToTheta(ringStart, angle);
    pushInput();
    drawRing();
  });
  const end = () => {
    ringStart = null;
    ringTheta = 0;
    pushInput();
    drawRing();
  };
  ring.addEventListener("pointerup", end);
  ring.addEventListener("pointercancel", end);
}

function drawPad(): void {
  const c = pad.getContext("2d")!;
  c.clearRect(0, 0, pad.width, pad.height);
  c.beginPath();
  c.arc(pad.width / 2, pad.height / 2, PAD_RADIUS, 0, 2 * Math.PI);
  c.fillStyle = "#ddd";
  c.fill();
  const [ux, uy] = joystick.axes();
  c.beginPath();
  c.arc(pad.width / 2 + ux * PAD_RADIUS, pad.height / 2 - uy * PAD_RADIUS, 18, 0, 2 * Math.PI);
  c.fillStyle = "#666";
  c.fill();
}

function drawRing(): void {
  const c = ring.getContext("2d")!;
  c.clearRect(0, 0, ring.width, ring.height);
  c.beginPath();
  c.arc(ring.width / 2, ring.height / 2, 45, 0, 2 * Math.PI);
  c.lineWidth = 14;
  c.strokeStyle = "#ddd";
  c.stroke();
  c.beginPath();
  c.arc(ring.width / 2, ring.height / 2, 45, -Math.PI / 2, -Math.PI / 2 - ringTheta * (Math.PI / 2), ringTheta > 0);
  c.strokeStyle = "#666";
  c.stroke();
}

function tick(): void {
  if (lastFrame !== null) renderFrame(ctx, lastFrame, canvas.width, canvas.height);
  requestAnimationFrame(tick);
}

bindPad();
bindRing();
drawPad();
drawRing();
requestAnimationFrame(tick);

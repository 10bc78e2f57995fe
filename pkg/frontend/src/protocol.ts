// Wire schema v1 for the teleop server (see docs/teleop-wire-protocol.md).

export const PROTOCOL_VERSION = 1;

export interface SceneObject {
  name: string;
  type: string;
  features: number[];
}

export interface Scene {
  objects: SceneObject[];
  held: string[];
}

export interface CompoundPart {
  half_w: number;
  half_h: number;
  dx: number;
  dy: number;
  dtheta: number;
}

export interface ShapeDescriptor {
  kind: "circle" | "rect" | "compound";
  dims: number[] | CompoundPart[];
  color: [number, number, number];
  solid: boolean;
}

export interface FrameMessage {
  v: number;
  type: "frame";
  tick: number;
  scene: Scene;
  shapes: Record<string, ShapeDescriptor>;
  reward: number;
  done: boolean;
  steps: number;
}

export interface CreatedMessage {
  v: number;
  type: "created";
  session_id: number;
  variant: string;
  seed: number;
}

export interface SavedMessage {
  v: number;
  type: "saved";
  path: string;
}

export interface ErrorMessage {
  v: number;
  type: "error";
  code: string;
  message: string;
}

export type ServerMessage = FrameMessage | CreatedMessage | SavedMessage | ErrorMessage;

export interface InputState {
  axes: [number, number, number];
  arm: -1 | 0 | 1;
  vacuum: "on" | "off" | null;
}

export const ZERO_INPUT: InputState = { axes: [0, 0, 0], arm: 0, vacuum: null };

export function encodeCreate(variant: string, seed?: number): string {
  const msg: Record<string, unknown> = { v: PROTOCOL_VERSION, type: "create", variant };
  if (seed !== undefined) msg.seed = seed;
  return JSON.stringify(msg) + "\n";
}

export function encodeInput(input: InputState): string {
  return (
    JSON.stringify({
      v: PROTOCOL_VERSION,
      type: "input",
      axes: input.axes,
      arm: input.arm,
      vacuum: input.vacuum,
    }) + "\n"
  );
}

export function encodeReset(seed?: number): string {
  const msg: Record<string, unknown> = { v: PROTOCOL_VERSION, type: "reset" };
  if (seed !== undefined) msg.seed = seed;
  return JSON.stringify(msg) + "\n";
}

export function encodeSave(): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, type: "save" }) + "\n";
}

export function sameInput(a: InputState, b: InputState): boolean {
  return (
    a.arm === b.arm &&
    a.vacuum === b.vacuum &&
    a.axes[0] === b.axes[0] &&
    a.axes[1] === b.axes[1] &&
    a.axes[2] === b.axes[2]
  );
}

/** Parse one server line; returns null for unusable payloads. */
export function decodeServerMessage(line: string): ServerMessage | null {
  let parsed: unknown;
  try {
    parsed = JSON.parse(line);
  } catch {
    return null;
  }
  const msg = parsed as { v?: number; type?: string };
  if (msg.v !== PROTOCOL_VERSION || typeof msg.type !== "string") return null;
  return parsed as ServerMessage;
}

/** Feature lookup by schema position for the few robot fields the UI draws. */
export const ROBOT_FEATURES = {
  x: 0,
  y: 1,
  theta: 2,
  arm: 3,
  vacOn: 4,
  baseRadius: 5,
  armMin: 6,
  armMax: 7,
  vacHalfW: 8,
  vacHalfH: 9,
} as const;

export function findObject(scene: Scene, name: string): SceneObject | undefined {
  return scene.objects.find((o) => o.name === name);
}

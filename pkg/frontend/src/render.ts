// Canvas rendering: every pixel derives from the last received frame.

import {
  CompoundPart,
  FrameMessage,
  ROBOT_FEATURES,
  Scene,
  ShapeDescriptor,
  findObject,
} from "./protocol.js";

export interface View {
  scale: number; // pixels per meter
  offsetX: number;
  offsetY: number;
  height: number;
}

/** Fit the world into the canvas with a 5% margin (y up in world). */
export function fitView(
  bounds: { x0: number; y0: number; x1: number; y1: number },
  width: number,
  height: number,
): View {
  const margin = 0.05 * Math.max(bounds.x1 - bounds.x0, bounds.y1 - bounds.y0);
  const w = bounds.x1 - bounds.x0 + 2 * margin;
  const h = bounds.y1 - bounds.y0 + 2 * margin;
  const scale = Math.min(width / w, height / h);
  return {
    scale,
    offsetX: (bounds.x0 - margin) * scale,
    offsetY: (bounds.y0 - margin) * scale,
    height,
  };
}

export function worldToScreen(view: View, x: number, y: number): [number, number] {
  return [x * view.scale - view.offsetX, view.height - (y * view.scale - view.offsetY)];
}

export function screenToWorldDelta(view: View, dx: number, dy: number): [number, number] {
  return [dx / view.scale, -dy / view.scale];
}

/** World-extent of everything in the frame, used to fit the view. */
export function sceneBounds(frame: FrameMessage): { x0: number; y0: number; x1: number; y1: number } {
  let x0 = Infinity;
  let y0 = Infinity;
  let x1 = -Infinity;
  let y1 = -Infinity;
  for (const obj of frame.scene.objects) {
    const desc = frame.shapes[obj.name];
    const x = obj.features[0];
    const y = obj.features[1];
    let r = 0.5;
    if (desc !== undefined) {
      if (desc.kind === "circle") r = (desc.dims as number[])[0];
      else if (desc.kind === "rect") {
        const [hw, hh] = desc.dims as number[];
        r = Math.hypot(hw, hh);
      } else {
        r = 1.5;
      }
    }
    x0 = Math.min(x0, x - r);
    y0 = Math.min(y0, y - r);
    x1 = Math.max(x1, x + r);
    y1 = Math.max(y1, y + r);
  }
  return { x0, y0, x1, y1 };
}

function cssColor(rgb: [number, number, number], alpha = 1.0): string {
  const [r, g, b] = rgb.map((c) => Math.round(255 * c));
  return `rgba(${r}, ${g}, ${b}, ${alpha})`;
}

function drawRect(
  ctx: CanvasRenderingContext2D,
  view: View,
  x: number,
  y: number,
  theta: number,
  hw: number,
  hh: number,
  fill: string,
  stroke?: string,
): void {
  const [sx, sy] = worldToScreen(view, x, y);
  ctx.save();
  ctx.translate(sx, sy);
  ctx.rotate(-theta);
  const w = 2 * hw * view.scale;
  const h = 2 * hh * view.scale;
  ctx.fillStyle = fill;
  ctx.fillRect(-w / 2, -h / 2, w, h);
  if (stroke) {
    ctx.strokeStyle = stroke;
    ctx.lineWidth = 2;
    ctx.strokeRect(-w / 2, -h / 2, w, h);
  }
  ctx.restore();
}

function drawCircle(
  ctx: CanvasRenderingContext2D,
  view: View,
  x: number,
  y: number,
  radius: number,
  fill: string,
): void {
  const [sx, sy] = worldToScreen(view, x, y);
  ctx.beginPath();
  ctx.arc(sx, sy, radius * view.scale, 0, 2 * Math.PI);
  ctx.fillStyle = fill;
  ctx.fill();
}

const GOAL_NAMES = new Set(["target_region", "goal_region", "shelf_region", "target_surface"]);

function drawObject(
  ctx: CanvasRenderingContext2D,
  view: View,
  scene: Scene,
  name: string,
  desc: ShapeDescriptor,
): void {
  const obj = findObject(scene, name);
  if (obj === undefined) return;
  const [x, y] = [obj.features[0], obj.features[1]];
  if (desc.kind === "circle") {
    const pressed = obj.type === "button" && obj.features[3] > 0.5;
    drawCircle(ctx, view, x, y, (desc.dims as number[])[0], cssColor(desc.color, pressed ? 0.35 : 1));
    return;
  }
  const theta = obj.features[2];
  if (desc.kind === "rect") {
    const [hw, hh] = desc.dims as number[];
    const isRegion = obj.type === "region";
    const alpha = isRegion ? 0.35 : 1.0;
    const stroke = GOAL_NAMES.has(name) ? cssColor([0.1, 0.5, 0.1]) : undefined;
    drawRect(ctx, view, x, y, theta, hw, hh, cssColor(desc.color, alpha), stroke);
    return;
  }
  for (const part of desc.dims as CompoundPart[]) {
    const c = Math.cos(theta);
    const s = Math.sin(theta);
    drawRect(
      ctx,
      view,
      x + c * part.dx - s * part.dy,
      y + s * part.dx + c * part.dy,
      theta + part.dtheta,
      part.half_w,
      part.half_h,
      cssColor(desc.color),
    );
  }
}

function drawRobot(ctx: CanvasRenderingContext2D, view: View, scene: Scene): void {
  const robot = findObject(scene, "robot");
  if (robot === undefined) return;
  const f = robot.features;
  const x = f[ROBOT_FEATURES.x];
  const y = f[ROBOT_FEATURES.y];
  const theta = f[ROBOT_FEATURES.theta];
  const arm = f[ROBOT_FEATURES.arm];
  const purple: [number, number, number] = [0.5, 0, 0.5];
  // Arm segment from the base to the end effector.
  const [bx, by] = worldToScreen(view, x, y);
  const [ex, ey] = worldToScreen(view, x + Math.cos(theta) * arm, y + Math.sin(theta) * arm);
  ctx.beginPath();
  ctx.moveTo(bx, by);
  ctx.lineTo(ex, ey);
  ctx.strokeStyle = "#444";
  ctx.lineWidth = Math.max(2, 0.04 * view.scale);
  ctx.stroke();
  drawCircle(ctx, view, x, y, f[ROBOT_FEATURES.baseRadius], cssColor(purple));
  const vacOn = f[ROBOT_FEATURES.vacOn] > 0.5;
  drawRect(
    ctx,
    view,
    x + Math.cos(theta) * arm,
    y + Math.sin(theta) * arm,
    theta,
    f[ROBOT_FEATURES.vacHalfW],
    f[ROBOT_FEATURES.vacHalfH],
    cssColor(vacOn ? [0.9, 0.4, 0.1] : purple),
  );
}

const DRAW_ORDER: Record<string, number> = {
  region: 0,
  wall: 1,
  barrier: 1,
  block: 2,
  hook: 2,
  button: 3,
};

/** Render one frame onto the canvas; returns the view used. */
export function renderFrame(
  ctx: CanvasRenderingContext2D,
  frame: FrameMessage,
  width: number,
  height: number,
): View {
  const view = fitView(sceneBounds(frame), width, height);
  ctx.fillStyle = "#f5f5f5";
  ctx.fillRect(0, 0, width, height);
  const names = frame.scene.objects
    .filter((o) => o.name !== "robot")
    .sort((a, b) => (DRAW_ORDER[a.type] ?? 2) - (DRAW_ORDER[b.type] ?? 2))
    .map((o) => o.name);
  for (const name of names) {
    const desc = frame.shapes[name];
    if (desc !== undefined) drawObject(ctx, view, frame.scene, name, desc);
  }
  drawRobot(ctx, view, frame.scene);
  return view;
}

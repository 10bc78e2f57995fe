// Joystick-like drag input: a translation pad plus a rotation ring.

export interface DragState {
  active: boolean;
  originX: number;
  originY: number;
  dx: number;
  dy: number;
}

export const IDLE_DRAG: DragState = { active: false, originX: 0, originY: 0, dx: 0, dy: 0 };

/**
 * Map a pixel drag vector to translation axes [ux, uy].
 *
 * Screen y points down, world y up. The drag is normalized by the pad
 * radius and clamped to the unit disk.
 */
export function dragToAxes(dx: number, dy: number, padRadius: number): [number, number] {
  let ux = dx / padRadius;
  let uy = (0 - dy) / padRadius;
  const mag = Math.hypot(ux, uy);
  if (mag > 1.0) {
    ux /= mag;
    uy /= mag;
  }
  return [ux, uy];
}

/** Map an angular drag along the rotation ring to a u_theta command. */
export function ringToTheta(
  startAngle: number,
  currentAngle: number,
): number {
  let delta = currentAngle - startAngle;
  while (delta > Math.PI) delta -= 2 * Math.PI;
  while (delta < -Math.PI) delta += 2 * Math.PI;
  // A quarter turn of the ring commands a full-rate rotation.
  return Math.max(-1, Math.min(1, delta / (Math.PI / 2)));
}

export class Joystick {
  private drag: DragState = { ...IDLE_DRAG };

  constructor(private padRadius: number) {}

  start(x: number, y: number): void {
    this.drag = { active: true, originX: x, originY: y, dx: 0, dy: 0 };
  }

  move(x: number, y: number): void {
    if (!this.drag.active) return;
    this.drag.dx = x - this.drag.originX;
    this.drag.dy = y - this.drag.originY;
  }

  release(): void {
    this.drag = { ...IDLE_DRAG };
  }

  axes(): [number, number] {
    if (!this.drag.active) return [0, 0];
    return dragToAxes(this.drag.dx, this.drag.dy, this.padRadius);
  }
}

// Keyboard mapping: arm extension, vacuum latch, reset, save.

export interface KeyState {
  arm: -1 | 0 | 1;
  vacuumLatch: boolean;
}

export type KeyCommand = "reset" | "save" | null;

export const INITIAL_KEYS: KeyState = { arm: 0, vacuumLatch: false };

/** Apply one keyboard event; returns the new state and a one-shot command. */
export function keyEvent(
  state: KeyState,
  kind: "down" | "up",
  key: string,
): { state: KeyState; command: KeyCommand } {
  let { arm, vacuumLatch } = state;
  let command: KeyCommand = null;
  const lower = key.length === 1 ? key.toLowerCase() : key;
  if (kind === "down") {
    if (lower === "w" || key === "ArrowUp") arm = 1;
    else if (lower === "s" || key === "ArrowDown") arm = -1;
    else if (key === " " || key === "Space" || key === "Spacebar") vacuumLatch = !vacuumLatch;
    else if (lower === "r") command = "reset";
    else if (key === "Enter") command = "save";
  } else {
    if ((lower === "w" || key === "ArrowUp") && arm === 1) arm = 0;
    if ((lower === "s" || key === "ArrowDown") && arm === -1) arm = 0;
  }
  return { state: { arm, vacuumLatch }, command };
}

export function vacuumField(state: KeyState): "on" | "off" {
  return state.vacuumLatch ? "on" : "off";
}

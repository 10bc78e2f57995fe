// Teleop session client: socket lifecycle, throttled input, frame callbacks.

import {
  FrameMessage,
  InputState,
  ServerMessage,
  ZERO_INPUT,
  decodeServerMessage,
  encodeCreate,
  encodeInput,
  encodeReset,
  encodeSave,
  sameInput,
} from "./protocol.js";

export interface ClientCallbacks {
  onFrame?: (frame: FrameMessage) => void;
  onCreated?: (sessionId: number, variant: string, seed: number) => void;
  onSaved?: (path: string) => void;
  onError?: (code: string, message: string) => void;
  onStatus?: (status: "connecting" | "open" | "closed") => void;
}

export class TeleopClient {
  private socket: WebSocket | null = null;
  private pending: InputState = ZERO_INPUT;
  private lastSent: InputState | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private url: string,
    private callbacks: ClientCallbacks,
    private sendRateHz = 20,
  ) {}

  connect(variant: string, seed?: number): void {
    this.callbacks.onStatus?.("connecting");
    this.socket = new WebSocket(this.url);
    this.socket.onopen = () => {
      this.callbacks.onStatus?.("open");
      this.socket?.send(encodeCreate(variant, seed));
      // Outgoing input is throttled to the server tick rate; identical
      // consecutive inputs are suppressed.
      this.timer = setInterval(() => this.flush(), 1000 / this.sendRateHz);
    };
    this.socket.onmessage = (event) => {
      for (const line of String(event.data).split("\n")) {
        if (!line.trim()) continue;
        const msg = decodeServerMessage(line);
        if (msg === null) {
          this.callbacks.onError?.("schema_mismatch", "unrecognized message");
          continue;
        }
        this.dispatch(msg);
      }
    };
    this.socket.onclose = () => {
      if (this.timer !== null) clearInterval(this.timer);
      this.timer = null;
      this.callbacks.onStatus?.("closed");
    };
  }

  private dispatch(msg: ServerMessage): void {
    switch (msg.type) {
      case "frame":
        this.callbacks.onFrame?.(msg);
        break;
      case "created":
        this.callbacks.onCreated?.(msg.session_id, msg.variant, msg.seed);
        break;
      case "saved":
        this.callbacks.onSaved?.(msg.path);
        break;
      case "error":
        this.callbacks.onError?.(msg.code, msg.message);
        break;
    }
  }

  setInput(input: InputState): void {
    this.pending = input;
  }

  private flush(): void {
    if (this.socket === null || this.socket.readyState !== WebSocket.OPEN) return;
    if (this.lastSent !== null && sameInput(this.pending, this.lastSent)) return;
    this.socket.send(encodeInput(this.pending));
    this.lastSent = this.pending;
  }

  reset(seed?: number): void {
    this.lastSent = null;
    this.pending = ZERO_INPUT;
    this.socket?.send(encodeReset(seed));
  }

  save(): void {
    this.socket?.send(encodeSave());
  }

  close(): void {
    this.socket?.close();
  }
}

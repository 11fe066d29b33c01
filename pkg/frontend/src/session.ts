// One operator session against the controller bridge. The session owns the
// connection lifecycle (hello handshake, axes streaming, teardown) and the
// latest received snapshot; rendering reads from it and never computes
// state of its own.

import { AxisWidget } from "./axes.js";
import {
  encode,
  makeAxes,
  makeHello,
  parse,
  ProtocolError,
  type FaultInjectKind,
  type Message,
  type StateMessage,
} from "./protocol.js";

export type ConnectionState = "disconnected" | "connecting" | "connected";

/** Thin socket interface so tests can drive the session without a network.
 * The browser adapter wraps a real WebSocket in main.ts. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((data: string) => void) | null;
  onclose: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface SessionOptions {
  sendRateHz?: number;
  now?: () => number; // ms clock, injectable for tests
}

export const DEFAULT_SEND_RATE_HZ = 50;
export const STALE_AFTER_MS = 500;

export class ConsoleSession {
  connectionState: ConnectionState = "disconnected";
  latestSnapshot: StateMessage | null = null;
  readonly axes = new AxisWidget();
  readonly sendRateHz: number;

  /** Filled in from the controller's hello reply. */
  controllerRateHz: number | null = null;
  controllerSnapshotHz: number | null = null;
  lastError: string | null = null;

  private readonly makeSocket: SocketFactory;
  private readonly now: () => number;
  private socket: SocketLike | null = null;
  private sendTimer: ReturnType<typeof setInterval> | null = null;
  private lastSnapshotAt: number | null = null;

  constructor(makeSocket: SocketFactory, options: SessionOptions = {}) {
    this.makeSocket = makeSocket;
    this.sendRateHz = options.sendRateHz ?? DEFAULT_SEND_RATE_HZ;
    this.now = options.now ?? Date.now;
  }

  connect(url: string): void {
    if (this.connectionState !== "disconnected") return;
    this.connectionState = "connecting";
    this.lastError = null;
    const socket = this.makeSocket(url);
    this.socket = socket;
    socket.onopen = () => {
      // First frame of the session must be the operator hello.
      socket.send(encode(makeHello()));
    };
    socket.onmessage = (data) => this.handleFrame(data);
    socket.onclose = () => this.handleClose();
  }

  /** Operator-initiated teardown. */
  close(): void {
    const socket = this.socket;
    this.handleClose();
    if (socket !== null) socket.close();
  }

  /** True when the session is connected but the snapshot stream has gone
   * quiet; the UI shows a stale indicator instead of inventing values. */
  isStale(): boolean {
    if (this.connectionState !== "connected") return false;
    if (this.lastSnapshotAt === null) return true;
    return this.now() - this.lastSnapshotAt > STALE_AFTER_MS;
  }

  sendEnable(): boolean {
    return this.sendFrame({ kind: "enable" });
  }

  sendDisable(): boolean {
    return this.sendFrame({ kind: "disable" });
  }

  sendReset(): boolean {
    return this.sendFrame({ kind: "reset" });
  }

  sendFaultInject(fault: FaultInjectKind, magnitude?: number): boolean {
    return this.sendFrame(
      magnitude === undefined
        ? { kind: "faultInject", fault }
        : { kind: "faultInject", fault, magnitude },
    );
  }

  private sendFrame(msg: Message): boolean {
    if (this.connectionState !== "connected" || this.socket === null) {
      return false;
    }
    try {
      this.socket.send(encode(msg));
    } catch {
      return false;
    }
    return true;
  }

  private handleFrame(data: string): void {
    let msg: Message;
    try {
      msg = parse(data);
    } catch (exc) {
      if (exc instanceof ProtocolError) {
        this.lastError = exc.message;
        return; // a bad frame never kills the session
      }
      throw exc;
    }
    if (this.connectionState === "connecting") {
      if (msg.kind === "hello" && msg.role === "controller") {
        this.connectionState = "connected";
        this.controllerRateHz = msg.rateHz ?? null;
        this.controllerSnapshotHz = msg.snapshotHz ?? null;
        this.startSending();
      } else if (msg.kind === "error") {
        // e.g. another operator session is active
        this.lastError = msg.message;
      }
      return;
    }
    if (msg.kind === "state") {
      this.latestSnapshot = msg;
      this.lastSnapshotAt = this.now();
    } else if (msg.kind === "error") {
      this.lastError = msg.message;
    }
  }

  private startSending(): void {
    const periodMs = 1000 / this.sendRateHz;
    this.sendTimer = setInterval(() => {
      // Guarded by sendFrame: no axes frames unless connected.
      this.sendFrame(makeAxes(this.axes.values));
    }, periodMs);
  }

  private handleClose(): void {
    if (this.sendTimer !== null) {
      clearInterval(this.sendTimer);
      this.sendTimer = null;
    }
    this.socket = null;
    this.connectionState = "disconnected";
    this.controllerRateHz = null;
    this.controllerSnapshotHz = null;
    this.lastSnapshotAt = null;
  }
}

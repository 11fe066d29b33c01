// Wire protocol between the console and the controller bridge: one JSON
// object per websocket frame. The shapes here are written by hand against
// PROTOCOL.md in the repository root; the backend validates with the same
// rules, so anything that passes parse() here is accepted there too.

export const PROTOCOL_VERSION = 1;

export const AXES_FIELDS = ["tx", "ty", "tz", "rx", "ry", "rz"] as const;
export type AxisName = (typeof AXES_FIELDS)[number];

export const FAULT_INJECT_KINDS = [
  "busTimeout",
  "encoderStuck",
  "encoderJump",
] as const;
export type FaultInjectKind = (typeof FAULT_INJECT_KINDS)[number];

export class ProtocolError extends Error {}

export interface HelloMessage {
  kind: "hello";
  role: "operator" | "controller";
  version: number;
  rateHz?: number; // controller hello only
  snapshotHz?: number; // controller hello only
}

export interface AxesMessage {
  kind: "axes";
  tx: number;
  ty: number;
  tz: number;
  rx: number;
  ry: number;
  rz: number;
  buttons: number;
}

export interface EnableMessage {
  kind: "enable";
}

export interface DisableMessage {
  kind: "disable";
}

export interface ResetMessage {
  kind: "reset";
}

export interface StateMessage {
  kind: "state";
  tick: number;
  mode: string;
  q1: number; // flexure bend, deg
  q2: number; // head rotation, deg in [0, 360)
  q3: number; // gripper slider, mm
  q4: number; // shaft rotation, deg in [0, 360)
  thetaTotal: number; // total jaw opening, deg
  tipWidth: number; // jaw tip separation, mm
  faults: string[];
}

export interface FaultInjectMessage {
  kind: "faultInject";
  fault: FaultInjectKind;
  magnitude?: number;
}

export interface ErrorMessage {
  kind: "error";
  message: string;
}

export type Message =
  | HelloMessage
  | AxesMessage
  | EnableMessage
  | DisableMessage
  | ResetMessage
  | StateMessage
  | FaultInjectMessage
  | ErrorMessage;

const KINDS = [
  "hello",
  "axes",
  "enable",
  "disable",
  "reset",
  "state",
  "faultInject",
  "error",
];

/** Serialize with sorted keys, matching the backend's frame layout. */
export function encode(msg: Message): string {
  const obj = msg as unknown as Record<string, unknown>;
  const keys = Object.keys(obj).sort();
  const parts = keys.map((k) => `${JSON.stringify(k)}:${JSON.stringify(obj[k])}`);
  return `{${parts.join(",")}}`;
}

export function makeHello(): HelloMessage {
  return { kind: "hello", role: "operator", version: PROTOCOL_VERSION };
}

export function makeAxes(
  values: Partial<Record<AxisName, number>>,
  buttons = 0,
): AxesMessage {
  return {
    kind: "axes",
    tx: values.tx ?? 0,
    ty: values.ty ?? 0,
    tz: values.tz ?? 0,
    rx: values.rx ?? 0,
    ry: values.ry ?? 0,
    rz: values.rz ?? 0,
    buttons,
  };
}

function requireField(msg: Record<string, unknown>, name: string): unknown {
  if (!(name in msg)) {
    throw new ProtocolError(`${msg["kind"]}: missing field ${name}`);
  }
  return msg[name];
}

function requireString(msg: Record<string, unknown>, name: string): string {
  const v = requireField(msg, name);
  if (typeof v !== "string") {
    throw new ProtocolError(`${msg["kind"]}: field ${name} has wrong type`);
  }
  return v;
}

function requireFinite(msg: Record<string, unknown>, name: string): number {
  const v = requireField(msg, name);
  // JSON.parse("1e999") yields Infinity, so finiteness is a real check.
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new ProtocolError(`${msg["kind"]}: field ${name} is not finite`);
  }
  return v;
}

function requireInt(msg: Record<string, unknown>, name: string): number {
  const v = requireField(msg, name);
  if (typeof v !== "number" || !Number.isInteger(v)) {
    throw new ProtocolError(`${msg["kind"]}: field ${name} has wrong type`);
  }
  return v;
}

/** Decode and schema-check one frame; throws ProtocolError on anything
 * that is not a well-formed message of a known kind. */
export function parse(text: string): Message {
  let msg: unknown;
  try {
    msg = JSON.parse(text);
  } catch (exc) {
    throw new ProtocolError(`frame is not valid JSON: ${exc}`);
  }
  if (typeof msg !== "object" || msg === null || Array.isArray(msg)) {
    throw new ProtocolError("frame must be a JSON object");
  }
  const obj = msg as Record<string, unknown>;
  const kind = obj["kind"];
  if (typeof kind !== "string" || !KINDS.includes(kind)) {
    throw new ProtocolError(`unknown message kind ${JSON.stringify(kind)}`);
  }

  if (kind === "hello") {
    const role = requireString(obj, "role");
    if (role !== "operator" && role !== "controller") {
      throw new ProtocolError(`hello: unknown role ${JSON.stringify(role)}`);
    }
    if ("version" in obj && obj["version"] !== PROTOCOL_VERSION) {
      throw new ProtocolError(
        `hello: unsupported version ${JSON.stringify(obj["version"])}`,
      );
    }
  } else if (kind === "axes") {
    for (const name of AXES_FIELDS) {
      requireFinite(obj, name);
    }
    if ("buttons" in obj) {
      const buttons = requireInt(obj, "buttons");
      if (buttons < 0) {
        throw new ProtocolError("axes: buttons must be non-negative");
      }
    }
  } else if (kind === "state") {
    requireInt(obj, "tick");
    requireString(obj, "mode");
    for (const name of ["q1", "q2", "q3", "q4", "thetaTotal", "tipWidth"]) {
      requireFinite(obj, name);
    }
    const faults = requireField(obj, "faults");
    if (!Array.isArray(faults) || !faults.every((f) => typeof f === "string")) {
      throw new ProtocolError("state: faults must be strings");
    }
  } else if (kind === "faultInject") {
    const fault = requireString(obj, "fault");
    if (!(FAULT_INJECT_KINDS as readonly string[]).includes(fault)) {
      throw new ProtocolError(
        `faultInject: unknown fault ${JSON.stringify(fault)}`,
      );
    }
    if ("magnitude" in obj) {
      requireInt(obj, "magnitude");
    }
  } else if (kind === "error") {
    requireString(obj, "message");
  }
  // enable/disable/reset carry no payload
  return obj as unknown as Message;
}

// Virtual 6-axis input: the master side of the loop. Values are normalized
// deflections in [-1, 1]; releasing any control springs its axis back to
// zero, which is what stops the instrument (the backend integrates
// velocity commands).

import { AXES_FIELDS, type AxisName } from "./protocol.js";

export type AxisValues = Record<AxisName, number>;

export function zeroAxes(): AxisValues {
  return { tx: 0, ty: 0, tz: 0, rx: 0, ry: 0, rz: 0 };
}

export function clampAxis(value: number): number {
  if (Number.isNaN(value)) return 0;
  return Math.max(-1, Math.min(1, value));
}

/** Keyboard pairs, one per instrument DOF. Only four of the six axes are
 * mapped; tx/ty are ignored by the backend pipeline. */
export interface KeyPair {
  axis: AxisName;
  label: string;
  plusKey: string; // KeyboardEvent.code
  minusKey: string;
  plusLabel: string;
  minusLabel: string;
}

export const KEY_PAIRS: readonly KeyPair[] = [
  {
    axis: "ry",
    label: "bend",
    plusKey: "KeyW",
    minusKey: "KeyS",
    plusLabel: "W = bend",
    minusLabel: "S = straighten",
  },
  {
    axis: "rz",
    label: "head rotate",
    plusKey: "KeyD",
    minusKey: "KeyA",
    plusLabel: "D = head cw",
    minusLabel: "A = head ccw",
  },
  {
    axis: "rx",
    label: "shaft rotate",
    plusKey: "KeyE",
    minusKey: "KeyQ",
    plusLabel: "E = shaft cw",
    minusLabel: "Q = shaft ccw",
  },
  {
    axis: "tz",
    label: "grip",
    plusKey: "KeyK",
    minusKey: "KeyJ",
    plusLabel: "K = close",
    minusLabel: "J = open",
  },
];

/**
 * Tracks which mapped keys are held and folds them into axis deflections:
 * a held key is full deflection, both keys of a pair cancel, and releasing
 * everything returns all axes to zero.
 */
export class AxisWidget {
  readonly values: AxisValues = zeroAxes();
  private held = new Set<string>();

  /** Slider/gamepad path: set one axis directly (clamped). */
  set(axis: AxisName, value: number): void {
    this.values[axis] = clampAxis(value);
  }

  /** Returns true when the code is a mapped key. */
  keyDown(code: string): boolean {
    if (!isMappedKey(code)) return false;
    this.held.add(code);
    this.refreshFromKeys();
    return true;
  }

  keyUp(code: string): boolean {
    if (!isMappedKey(code)) return false;
    this.held.delete(code);
    this.refreshFromKeys();
    return true;
  }

  /** Spring-return: all controls released at once. */
  releaseAll(): void {
    this.held.clear();
    for (const name of AXES_FIELDS) {
      this.values[name] = 0;
    }
  }

  private refreshFromKeys(): void {
    for (const pair of KEY_PAIRS) {
      const plus = this.held.has(pair.plusKey) ? 1 : 0;
      const minus = this.held.has(pair.minusKey) ? 1 : 0;
      this.values[pair.axis] = plus - minus;
    }
  }
}

function isMappedKey(code: string): boolean {
  return KEY_PAIRS.some((p) => p.plusKey === code || p.minusKey === code);
}

/** Standard-mapping gamepad sticks onto the same four DOFs: left stick
 * Y bends, left stick X rotates the head, right stick X rotates the
 * shaft, right stick Y works the grip. Stick up is negative in the
 * Gamepad API, so Y axes are flipped to keep "up = more". */
export function gamepadToAxes(padAxes: readonly number[]): Partial<AxisValues> {
  const out: Partial<AxisValues> = {};
  const [lx, ly, rx, ry] = [padAxes[0], padAxes[1], padAxes[2], padAxes[3]];
  if (ly !== undefined) out.ry = clampAxis(-ly);
  if (lx !== undefined) out.rz = clampAxis(lx);
  if (rx !== undefined) out.rx = clampAxis(rx);
  if (ry !== undefined) out.tz = clampAxis(-ry);
  return out;
}

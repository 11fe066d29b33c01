import { describe, expect, it } from "vitest";

import {
  AxisWidget,
  clampAxis,
  gamepadToAxes,
  KEY_PAIRS,
  zeroAxes,
} from "../src/axes.js";
import { AXES_FIELDS } from "../src/protocol.js";

describe("clamping", () => {
  it("keeps deflections in [-1, 1]", () => {
    expect(clampAxis(0.5)).toBe(0.5);
    expect(clampAxis(1.7)).toBe(1);
    expect(clampAxis(-3)).toBe(-1);
    expect(clampAxis(Number.NaN)).toBe(0);
  });

  it("applies on set()", () => {
    const w = new AxisWidget();
    w.set("ry", 2.5);
    expect(w.values.ry).toBe(1);
    w.set("tz", -1.0001);
    expect(w.values.tz).toBe(-1);
  });
});

describe("keyboard pairs", () => {
  it("map the four instrument DOFs and nothing else", () => {
    expect(KEY_PAIRS.map((p) => p.axis).sort()).toEqual(["rx", "ry", "rz", "tz"]);
    const codes = KEY_PAIRS.flatMap((p) => [p.plusKey, p.minusKey]);
    expect(new Set(codes).size).toBe(codes.length);
  });

  it("hold bend key gives full deflection, release springs back", () => {
    const w = new AxisWidget();
    expect(w.keyDown("KeyW")).toBe(true);
    expect(w.values.ry).toBe(1);
    expect(w.keyUp("KeyW")).toBe(true);
    expect(w.values.ry).toBe(0);
  });

  it("opposite keys cancel", () => {
    const w = new AxisWidget();
    w.keyDown("KeyW");
    w.keyDown("KeyS");
    expect(w.values.ry).toBe(0);
    w.keyUp("KeyW");
    expect(w.values.ry).toBe(-1);
  });

  it("ignores unmapped keys", () => {
    const w = new AxisWidget();
    expect(w.keyDown("KeyZ")).toBe(false);
    expect(w.values).toEqual(zeroAxes());
  });

  it("releaseAll zeroes every axis including slider-set ones", () => {
    const w = new AxisWidget();
    w.keyDown("KeyK");
    w.set("ry", 0.4);
    w.releaseAll();
    for (const name of AXES_FIELDS) {
      expect(w.values[name]).toBe(0);
    }
    // held-key bookkeeping is cleared too: a later keyup changes nothing
    w.keyUp("KeyK");
    expect(w.values.tz).toBe(0);
  });
});

describe("gamepad mapping", () => {
  it("half stick deflection is 0.5 on the mapped axis", () => {
    const out = gamepadToAxes([0, -0.5, 0, 0]);
    expect(out.ry).toBe(0.5);
  });

  it("maps both sticks onto the four DOFs", () => {
    const out = gamepadToAxes([0.25, -1, 0.75, 1]);
    expect(out).toEqual({ ry: 1, rz: 0.25, rx: 0.75, tz: -1 });
  });

  it("clamps out-of-range pad values", () => {
    const out = gamepadToAxes([2, -2, 0, 0]);
    expect(out.rz).toBe(1);
    expect(out.ry).toBe(1);
  });

  it("tolerates pads with fewer axes", () => {
    expect(gamepadToAxes([0.5])).toEqual({ rz: 0.5 });
    expect(gamepadToAxes([])).toEqual({});
  });
});

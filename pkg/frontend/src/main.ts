// Browser wiring: binds the session, widgets, and SVG views to the page.
// Everything testable lives in the imported modules; this file only moves
// values between them and the DOM.

import { gamepadToAxes, KEY_PAIRS, type AxisValues } from "./axes.js";
import {
  flexureArc,
  flexureExitAngle,
  jawTips,
  polylinePath,
  type Point,
} from "./schematic.js";
import { ConsoleSession, type SocketLike } from "./session.js";
import type { AxisName, StateMessage } from "./protocol.js";

function browserSocket(url: string): SocketLike {
  const ws = new WebSocket(url);
  const adapter: SocketLike = {
    send: (d) => ws.send(d),
    close: () => ws.close(),
    onopen: null,
    onmessage: null,
    onclose: null,
  };
  ws.onopen = () => adapter.onopen?.();
  ws.onmessage = (ev) => adapter.onmessage?.(String(ev.data));
  ws.onclose = () => adapter.onclose?.();
  return adapter;
}

const session = new ConsoleSession(browserSocket);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

// ---- connection ------------------------------------------------------

const urlInput = el<HTMLInputElement>("url");
const connectBtn = el<HTMLButtonElement>("connect");

connectBtn.addEventListener("click", () => {
  if (session.connectionState === "disconnected") {
    session.connect(urlInput.value);
  } else {
    session.close();
  }
});

// ---- axis sliders and keyboard ---------------------------------------

interface SliderBinding {
  axis: AxisName;
  input: HTMLInputElement;
  output: HTMLOutputElement;
  dragging: boolean;
}

const sliders: SliderBinding[] = KEY_PAIRS.map((pair) => ({
  axis: pair.axis,
  input: el<HTMLInputElement>(`ax-${pair.axis}`),
  output: el<HTMLOutputElement>(`axv-${pair.axis}`),
  dragging: false,
}));

for (const s of sliders) {
  s.input.addEventListener("pointerdown", () => {
    s.dragging = true;
  });
  s.input.addEventListener("input", () => {
    session.axes.set(s.axis, Number(s.input.value) / 100);
  });
  // Spring-return on release, wherever the pointer ends up.
  const release = () => {
    s.dragging = false;
    session.axes.set(s.axis, 0);
  };
  s.input.addEventListener("pointerup", release);
  s.input.addEventListener("pointercancel", release);
}

window.addEventListener("keydown", (ev) => {
  if (ev.repeat) return;
  if (helpOverlay.classList.contains("visible")) return;
  if (document.activeElement === urlInput) return;
  if (session.axes.keyDown(ev.code)) ev.preventDefault();
});
window.addEventListener("keyup", (ev) => {
  if (session.axes.keyUp(ev.code)) ev.preventDefault();
});
window.addEventListener("blur", () => session.axes.releaseAll());

// Gamepad: applies only while deflected, then releases its axes once, so
// it does not fight the keyboard or sliders when idle.
const padActive = new Set<AxisName>();

function pollGamepad(): void {
  const pads = navigator.getGamepads ? navigator.getGamepads() : [];
  const pad = Array.from(pads).find((p) => p !== null);
  if (!pad) return;
  const mapped = gamepadToAxes(pad.axes);
  for (const [name, value] of Object.entries(mapped) as [AxisName, number][]) {
    if (Math.abs(value) >= 0.05) {
      session.axes.set(name, value);
      padActive.add(name);
    } else if (padActive.has(name)) {
      session.axes.set(name, 0);
      padActive.delete(name);
    }
  }
}

// ---- command buttons ---------------------------------------------------

el<HTMLButtonElement>("enable").addEventListener("click", () => session.sendEnable());
el<HTMLButtonElement>("disable").addEventListener("click", () => session.sendDisable());
el<HTMLButtonElement>("reset").addEventListener("click", () => session.sendReset());
el<HTMLButtonElement>("fault-reset").addEventListener("click", () => session.sendReset());

// ---- help overlay -------------------------------------------------------

const helpOverlay = el<HTMLDivElement>("help-overlay");
const helpKeys = el<HTMLTableElement>("help-keys");
for (const pair of KEY_PAIRS) {
  const row = helpKeys.insertRow();
  row.insertCell().textContent = pair.label;
  const plus = pair.plusKey.replace("Key", "");
  const minus = pair.minusKey.replace("Key", "");
  row.insertCell().innerHTML = `<kbd>${plus}</kbd> / <kbd>${minus}</kbd>`;
  row.insertCell().textContent = `${pair.plusLabel}, ${pair.minusLabel}`;
}
el<HTMLButtonElement>("help-btn").addEventListener("click", () => {
  helpOverlay.classList.toggle("visible");
});
el<HTMLButtonElement>("help-close").addEventListener("click", () => {
  helpOverlay.classList.remove("visible");
});

// ---- rendering ----------------------------------------------------------

const connBadge = el<HTMLSpanElement>("conn-badge");
const modeBadge = el<HTMLSpanElement>("mode-badge");
const staleTag = el<HTMLSpanElement>("stale");
const faultBanner = el<HTMLDivElement>("fault-banner");
const faultList = el<HTMLSpanElement>("fault-list");
const schematic = el<SVGSVGElement & HTMLElement>("schematic");
const gauge = el<SVGSVGElement & HTMLElement>("gauge");

const MODE_CLASS: Record<string, string> = {
  TELEOP: "ok",
  IDLE: "warn",
  FAULT: "bad",
};

function fmt(v: number, unit: string): string {
  return `${v.toFixed(1)} ${unit}`;
}

function renderReadouts(snap: StateMessage | null): void {
  const set = (id: string, text: string) => {
    el(id).textContent = text;
  };
  if (snap === null) {
    for (const id of ["ro-tick", "ro-q1", "ro-q2", "ro-q3", "ro-q4", "ro-theta", "ro-width"]) {
      set(id, "–");
    }
    return;
  }
  set("ro-tick", String(snap.tick));
  set("ro-q1", fmt(snap.q1, "°"));
  set("ro-q2", fmt(snap.q2, "°"));
  set("ro-q3", fmt(snap.q3, "mm"));
  set("ro-q4", fmt(snap.q4, "°"));
  set("ro-theta", fmt(snap.thetaTotal, "°"));
  set("ro-width", fmt(snap.tipWidth, "mm"));
}

// Drawing proportions (page units, not mm): shaft into the frame from the
// left, flexure arc, head disc, jaws.
const SHAFT_LEN = 150;
const FLEX_LEN = 80;
const HEAD_LEN = 26;
const JAW_LEN = 40;
const ORIGIN: Point = { x: 20, y: 110 };

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS("http://www.w3.org/2000/svg", tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

function renderSchematic(snap: StateMessage | null): void {
  schematic.replaceChildren();
  if (snap === null) return;
  // Screen y grows downward; flip bend so +q1 curls upward on the page.
  const arc = flexureArc(snap.q1, FLEX_LEN).map((p) => ({
    x: ORIGIN.x + SHAFT_LEN + p.x,
    y: ORIGIN.y - p.y,
  }));
  const exitDeg = flexureExitAngle(snap.q1);
  const exitRad = (exitDeg * Math.PI) / 180;
  const arcEnd = arc[arc.length - 1] ?? ORIGIN;
  const headEnd: Point = {
    x: arcEnd.x + HEAD_LEN * Math.cos(exitRad),
    y: arcEnd.y - HEAD_LEN * Math.sin(exitRad),
  };

  // Shaft with a q4 roll tick on a small end dial.
  schematic.append(
    svgEl("line", {
      x1: String(ORIGIN.x), y1: String(ORIGIN.y),
      x2: String(ORIGIN.x + SHAFT_LEN), y2: String(ORIGIN.y),
      class: "schem-line", "stroke-width": "6", "stroke-linecap": "round",
    }),
  );
  appendRollDial(schematic, { x: ORIGIN.x + 24, y: ORIGIN.y }, 12, snap.q4, "q4");

  // Flexure arc.
  schematic.append(
    svgEl("path", {
      d: polylinePath(arc),
      class: "schem-line", "stroke-width": "4", "stroke-linecap": "round",
    }),
  );

  // Head segment with its own roll tick (q2).
  schematic.append(
    svgEl("line", {
      x1: String(arcEnd.x), y1: String(arcEnd.y),
      x2: String(headEnd.x), y2: String(headEnd.y),
      class: "schem-line", "stroke-width": "5", "stroke-linecap": "round",
    }),
  );
  appendRollDial(schematic, headEnd, 9, snap.q2, "q2");

  // Scissor jaws opened by thetaTotal about the head direction.
  const [upper, lower] = jawTips(snap.thetaTotal, JAW_LEN, exitDeg, { x: 0, y: 0 });
  for (const tip of [upper, lower]) {
    schematic.append(
      svgEl("line", {
        x1: String(headEnd.x), y1: String(headEnd.y),
        x2: String(headEnd.x + tip.x), y2: String(headEnd.y - tip.y),
        class: "schem-line", "stroke-width": "3", "stroke-linecap": "round",
      }),
    );
  }
}

function appendRollDial(
  root: SVGElement, center: Point, radius: number, angleDeg: number, label: string,
): void {
  root.append(
    svgEl("circle", {
      cx: String(center.x), cy: String(center.y), r: String(radius),
      class: "schem-dim", "stroke-width": "1.5",
    }),
  );
  const rad = (angleDeg * Math.PI) / 180;
  root.append(
    svgEl("line", {
      x1: String(center.x), y1: String(center.y),
      x2: String(center.x + radius * Math.sin(rad)),
      y2: String(center.y - radius * Math.cos(rad)),
      class: "schem-dim", "stroke-width": "1.5",
    }),
  );
  const text = svgEl("text", {
    x: String(center.x), y: String(center.y + radius + 12),
    fill: "currentColor", "font-size": "10", "text-anchor": "middle",
  });
  text.textContent = label;
  root.append(text);
}

const GAUGE_MAX_DEG = 90; // jaw opening range shown on the dial

function renderGauge(snap: StateMessage | null): void {
  gauge.replaceChildren();
  const cx = 110;
  const cy = 110;
  const r = 86;
  // Dial face from fully closed (left) to fully open (right).
  gauge.append(
    svgEl("path", {
      d: `M${cx - r} ${cy} A${r} ${r} 0 0 1 ${cx + r} ${cy}`,
      class: "schem-dim", "stroke-width": "2",
    }),
  );
  for (const tickDeg of [0, 30, 60, 90]) {
    const a = Math.PI * (1 - tickDeg / GAUGE_MAX_DEG);
    gauge.append(
      svgEl("line", {
        x1: String(cx + (r - 6) * Math.cos(a)), y1: String(cy - (r - 6) * Math.sin(a)),
        x2: String(cx + r * Math.cos(a)), y2: String(cy - r * Math.sin(a)),
        class: "schem-dim", "stroke-width": "2",
      }),
    );
  }
  if (snap === null) return;
  const clamped = Math.max(0, Math.min(GAUGE_MAX_DEG, snap.thetaTotal));
  const a = Math.PI * (1 - clamped / GAUGE_MAX_DEG);
  gauge.append(
    svgEl("line", {
      x1: String(cx), y1: String(cy),
      x2: String(cx + (r - 12) * Math.cos(a)), y2: String(cy - (r - 12) * Math.sin(a)),
      class: "schem-line", "stroke-width": "3", "stroke-linecap": "round",
    }),
  );
  const text = svgEl("text", {
    x: String(cx), y: String(cy - 24),
    fill: "currentColor", "font-size": "13", "text-anchor": "middle",
  });
  text.textContent = `${snap.thetaTotal.toFixed(1)}°  W ${snap.tipWidth.toFixed(1)} mm`;
  gauge.append(text);
}

let lastRenderedTick = -1;
let lastRenderedMode = "";

function render(): void {
  pollGamepad();

  const state = session.connectionState;
  connBadge.textContent = state;
  connBadge.className = `badge ${state === "connected" ? "ok" : state === "connecting" ? "warn" : ""}`;
  connectBtn.textContent = state === "disconnected" ? "Connect" : "Disconnect";
  staleTag.className = session.isStale() ? "visible" : "";

  const connected = state === "connected";
  for (const id of ["enable", "disable", "reset"]) {
    el<HTMLButtonElement>(id).disabled = !connected;
  }

  for (const s of sliders) {
    const value = session.axes.values[s.axis];
    s.output.textContent = value.toFixed(2);
    if (!s.dragging) s.input.value = String(Math.round(value * 100));
  }

  const snap = connected ? session.latestSnapshot : null;
  const mode = snap?.mode ?? "–";
  modeBadge.textContent = mode;
  modeBadge.className = `badge ${MODE_CLASS[mode] ?? ""}`;

  const inFault = snap !== null && snap.mode === "FAULT";
  faultBanner.className = inFault ? "visible" : "";
  if (inFault && snap !== null) {
    faultList.textContent = snap.faults.join(", ") || "unspecified fault";
  }

  renderReadouts(snap);
  // SVG rebuilds only when the snapshot actually advanced.
  if (snap === null || snap.tick !== lastRenderedTick || snap.mode !== lastRenderedMode) {
    renderSchematic(snap);
    renderGauge(snap);
    lastRenderedTick = snap?.tick ?? -1;
    lastRenderedMode = snap?.mode ?? "";
  }

  requestAnimationFrame(render);
}

requestAnimationFrame(render);

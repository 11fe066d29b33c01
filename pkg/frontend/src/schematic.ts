// 2D side-view schematic of the instrument, derived only from snapshot
// fields: shaft, constant-curvature flexure arc (bend q1), head disc
// (rotation q2), and the two scissor jaws (opening thetaTotal). Bending is
// single-plane, so a 2D drawing shows everything the model has.

export interface Point {
  x: number;
  y: number;
}

const DEG = Math.PI / 180;

/**
 * Polyline for a constant-curvature arc of the given length that leaves
 * the origin along +x and curls toward +y by bendDeg in total. Zero bend
 * degenerates to a straight segment.
 */
export function flexureArc(
  bendDeg: number,
  length: number,
  segments = 24,
): Point[] {
  const theta = bendDeg * DEG;
  const pts: Point[] = [];
  for (let i = 0; i <= segments; i++) {
    const t = i / segments;
    if (Math.abs(theta) < 1e-9) {
      pts.push({ x: length * t, y: 0 });
    } else {
      const radius = length / theta;
      const phi = theta * t;
      pts.push({ x: radius * Math.sin(phi), y: radius * (1 - Math.cos(phi)) });
    }
  }
  return pts;
}

/** Tangent direction (deg from +x) at the arc's distal end; the head and
 * jaws are drawn along it. */
export function flexureExitAngle(bendDeg: number): number {
  return bendDeg;
}

/** Jaw tip separation for a symmetric scissor pair of the given jaw
 * length; matches the backend's tip-width formula, used only to draw the
 * gauge arc consistently with the tipWidth field it displays. */
export function tipSeparation(thetaTotalDeg: number, jawLength: number): number {
  return 2 * jawLength * Math.sin((thetaTotalDeg / 2) * DEG);
}

/**
 * Endpoints of the two jaw segments, opened symmetrically about a
 * centerline at centerDeg from +x. Returned as [upper tip, lower tip]
 * relative to the pivot.
 */
export function jawTips(
  thetaTotalDeg: number,
  jawLength: number,
  centerDeg: number,
  pivot: Point,
): [Point, Point] {
  const half = thetaTotalDeg / 2;
  const upper = (centerDeg + half) * DEG;
  const lower = (centerDeg - half) * DEG;
  return [
    { x: pivot.x + jawLength * Math.cos(upper), y: pivot.y + jawLength * Math.sin(upper) },
    { x: pivot.x + jawLength * Math.cos(lower), y: pivot.y + jawLength * Math.sin(lower) },
  ];
}

/** SVG path string for a polyline. */
export function polylinePath(pts: Point[]): string {
  return pts
    .map((p, i) => `${i === 0 ? "M" : "L"}${round3(p.x)} ${round3(p.y)}`)
    .join(" ");
}

function round3(v: number): number {
  return Math.round(v * 1000) / 1000;
}

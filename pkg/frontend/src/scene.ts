/**
 * Scene construction: turns a state frame into drawing primitives in screen
 * space. Kept free of canvas calls so the geometry is unit-testable; the
 * renderer just walks the returned shape list.
 */

import type { SceneFrame } from "./protocol.js";

export const DEFAULT_PX_PER_MM = 4; // a 0.7 mm clip still spans ~3 px
export const DELICATE_FORCE_LIMIT_N = 40;

export interface Viewport {
  widthPx: number;
  heightPx: number;
  pxPerMm: number;
  /** world x (mm) at the horizontal centre of the canvas */
  centerXmm: number;
  /** world z (mm) drawn at this many px above the canvas bottom */
  tableFromBottomPx: number;
}

export function defaultViewport(widthPx: number, heightPx: number): Viewport {
  return {
    widthPx,
    heightPx,
    pxPerMm: DEFAULT_PX_PER_MM,
    centerXmm: 0,
    tableFromBottomPx: Math.round(heightPx * 0.18),
  };
}

/** World (mm, z up) -> screen (px, y down). */
export function toScreen(v: Viewport, xMm: number, zMm: number): [number, number] {
  const sx = v.widthPx / 2 + (xMm - v.centerXmm) * v.pxPerMm;
  const sy = v.heightPx - v.tableFromBottomPx - zMm * v.pxPerMm;
  return [sx, sy];
}

export type Shape =
  | { kind: "polygon"; points: [number, number][]; fill: string; stroke: string }
  | { kind: "line"; from: [number, number]; to: [number, number]; width: number; color: string }
  | { kind: "arrow"; from: [number, number]; to: [number, number]; color: string; label?: string }
  | { kind: "dot"; at: [number, number]; radius: number; color: string };

export const COLORS = {
  table: "#6b5d4f",
  object: "#4f86c6",
  fixedFinger: "#d9822b",   // visually distinct from the actuated finger
  actuatedFinger: "#3aa17e",
  contact: "#e04f5f",
  force: "#e04f5f",
};

/** Newtons -> arrow length in px (clamped so big spikes stay on screen). */
export function forceArrowPx(force: number, pxPerNewton = 3, maxPx = 120): number {
  return Math.min(Math.abs(force) * pxPerNewton, maxPx);
}

export function buildShapes(frame: SceneFrame, v: Viewport): Shape[] {
  const shapes: Shape[] = [];
  // Table surface.
  const [, tableY] = toScreen(v, 0, 0);
  shapes.push({
    kind: "polygon",
    points: [[0, tableY], [v.widthPx, tableY], [v.widthPx, v.heightPx], [0, v.heightPx]],
    fill: COLORS.table,
    stroke: COLORS.table,
  });
  // Object.
  shapes.push({
    kind: "polygon",
    points: frame.object_mm.map(([x, z]) => toScreen(v, x, z)),
    fill: COLORS.object,
    stroke: "#2b4d73",
  });
  // Fixed finger: a slat rising from its (slider-adjusted) tip.
  const [fx, fz] = frame.fixed_tip_mm;
  const w = frame.fixed_width_mm;
  shapes.push({
    kind: "polygon",
    points: [
      toScreen(v, fx - w, fz),
      toScreen(v, fx, fz),
      toScreen(v, fx, fz + frame.fixed_len_mm),
      toScreen(v, fx - w, fz + frame.fixed_len_mm),
    ],
    fill: COLORS.fixedFinger,
    stroke: "#9c5a17",
  });
  // Actuated finger links.
  for (const [ax, az, bx, bz] of frame.finger_mm) {
    shapes.push({
      kind: "line",
      from: toScreen(v, ax, az),
      to: toScreen(v, bx, bz),
      width: 6,
      color: COLORS.actuatedFinger,
    });
  }
  // Contacts with force vectors.
  for (const c of frame.contacts) {
    const at = toScreen(v, c.pos_mm[0], c.pos_mm[1]);
    shapes.push({ kind: "dot", at, radius: 4, color: COLORS.contact });
    const len = forceArrowPx(c.force);
    if (len > 1) {
      // Arrow along the force on the second body (screen y is flipped).
      const to: [number, number] = [at[0] + c.normal[0] * len, at[1] - c.normal[1] * len];
      shapes.push({ kind: "arrow", from: at, to, color: COLORS.force,
                    label: `${c.force.toFixed(1)} N` });
    }
  }
  return shapes;
}

export interface GaugeState {
  fraction: number;     // 0..1 of the gauge bar filled
  overLimit: boolean;   // crossed the delicate-grasp line
  label: string;
}

/** Live table-force gauge against the delicate-grasp threshold. */
export function forceGauge(tableForce: number, limit = DELICATE_FORCE_LIMIT_N,
                           fullScale = 1.5 * DELICATE_FORCE_LIMIT_N): GaugeState {
  const fraction = Math.max(0, Math.min(tableForce / fullScale, 1));
  return {
    fraction,
    overLimit: tableForce >= limit,
    label: `${tableForce.toFixed(2)} N`,
  };
}

/** Threshold line position within a gauge of the given px width. */
export function gaugeThresholdPx(widthPx: number, limit = DELICATE_FORCE_LIMIT_N,
                                 fullScale = 1.5 * DELICATE_FORCE_LIMIT_N): number {
  return (limit / fullScale) * widthPx;
}

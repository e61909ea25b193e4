/** The single affine mapping from server-embedded coordinates to screen.
 *
 * Server payloads carry every drawable's position as an `*_xy` pair in the
 * service's fixed triangle embedding (x in about [-0.87, 0.87], y in
 * [-0.5, 1]). The UI only ever scales and translates those values; it
 * never derives coordinates from the barycentric triples. Keeping the
 * transform in one place is what makes the payload-to-DOM audit possible.
 */

import type { XY } from "./types.js";

export interface Viewport {
  size: number;
  scale: number;
  cx: number;
  cy: number;
}

export function makeViewport(size: number): Viewport {
  const margin = size * 0.11;
  const scale = (size - 2 * margin) / Math.sqrt(3);
  return { size, scale, cx: size / 2, cy: margin + scale };
}

export function toScreen(vp: Viewport, xy: XY): XY {
  return [vp.cx + xy[0] * vp.scale, vp.cy - xy[1] * vp.scale];
}

/** Triangle frame corners in embedded coordinates (board chrome). */
export const FRAME_XY: XY[] = [
  [0, 1],
  [-Math.sqrt(3) / 2, -0.5],
  [Math.sqrt(3) / 2, -0.5],
];

export const AXIS_LABELS = ["social", "environmental", "economic"] as const;

export function fmt(v: number): string {
  return v.toFixed(2);
}

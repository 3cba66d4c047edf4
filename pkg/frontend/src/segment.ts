// Geometry for drawing the pending candidate set: the segment is projected
// onto two selectable coordinates and mapped into a pixel viewport, with
// markers for the nominal action (delta = 0), both endpoints, and the
// current slider position.

import type { SegmentGeometry } from "./types";

export interface Viewport {
  width: number;
  height: number;
  pad: number;
}

export interface Point {
  x: number;
  y: number;
}

export interface SegmentProjection {
  degenerate: boolean;
  center: Point;
  lo: Point;
  hi: Point;
  axes: [number, number];
}

function at(values: number[], index: number): number {
  return values[index] ?? 0;
}

/** Project the segment onto coordinate pair `axes` and scale into the
 * viewport.  A set whose full-dimensional extent is zero is degenerate and
 * collapses to the centered point. */
export function projectSegment(
  segment: SegmentGeometry,
  axes: [number, number],
  viewport: Viewport,
): SegmentProjection {
  const [i, j] = axes;
  const reach = Math.hypot(...segment.direction) * segment.gamma;
  const cx = at(segment.center, i);
  const cy = at(segment.center, j);
  const dx = at(segment.direction, i) * segment.gamma;
  const dy = at(segment.direction, j) * segment.gamma;

  const spanX = Math.max(Math.abs(dx), 1e-12);
  const spanY = Math.max(Math.abs(dy), 1e-12);
  const usableW = viewport.width - 2 * viewport.pad;
  const usableH = viewport.height - 2 * viewport.pad;
  const scale = Math.min(usableW / (2 * spanX), usableH / (2 * spanY));

  const map = (px: number, py: number): Point => ({
    x: viewport.width / 2 + (px - cx) * scale,
    y: viewport.height / 2 - (py - cy) * scale,
  });

  return {
    degenerate: reach === 0,
    center: map(cx, cy),
    lo: map(cx - dx, cy - dy),
    hi: map(cx + dx, cy + dy),
    axes,
  };
}

/** Pixel position of the slider's current delta on the projected segment. */
export function markerForDelta(proj: SegmentProjection, delta: number, gamma: number): Point {
  if (proj.degenerate || gamma === 0) {
    return proj.center;
  }
  const s = Math.min(1, Math.max(-1, delta / gamma));
  return {
    x: proj.center.x + s * (proj.hi.x - proj.center.x),
    y: proj.center.y + s * (proj.hi.y - proj.center.y),
  };
}

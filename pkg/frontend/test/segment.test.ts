import { describe, expect, it } from "vitest";

import { markerForDelta, projectSegment } from "../src/segment";
import type { SegmentGeometry } from "../src/types";

const VIEW = { width: 360, height: 220, pad: 30 };

const seg: SegmentGeometry = {
  kind: "segment",
  center: [-1.1667, -2.3333, -0.5833],
  direction: [-2.3575, 0, 0],
  gamma: 0.0848351415952103,
};

describe("projectSegment", () => {
  it("centers the nominal action in the viewport", () => {
    const proj = projectSegment(seg, [0, 1], VIEW);
    expect(proj.center.x).toBeCloseTo(VIEW.width / 2);
    expect(proj.center.y).toBeCloseTo(VIEW.height / 2);
    expect(proj.degenerate).toBe(false);
  });

  it("keeps both endpoints inside the padded box", () => {
    const proj = projectSegment(seg, [0, 1], VIEW);
    for (const p of [proj.lo, proj.hi]) {
      expect(p.x).toBeGreaterThanOrEqual(VIEW.pad - 1e-9);
      expect(p.x).toBeLessThanOrEqual(VIEW.width - VIEW.pad + 1e-9);
      expect(p.y).toBeGreaterThanOrEqual(VIEW.pad - 1e-9);
      expect(p.y).toBeLessThanOrEqual(VIEW.height - VIEW.pad + 1e-9);
    }
  });

  it("places endpoints symmetric about the center", () => {
    const proj = projectSegment(seg, [0, 1], VIEW);
    expect((proj.lo.x + proj.hi.x) / 2).toBeCloseTo(proj.center.x, 6);
    expect((proj.lo.y + proj.hi.y) / 2).toBeCloseTo(proj.center.y, 6);
  });

  it("flags the degenerate set", () => {
    const proj = projectSegment(
      { ...seg, direction: [0, 0, 0] },
      [0, 1],
      VIEW,
    );
    expect(proj.degenerate).toBe(true);
    expect(proj.lo).toEqual(proj.center);
  });

  it("projects onto any selected coordinate pair", () => {
    const proj12 = projectSegment(seg, [1, 2], VIEW);
    // The segment only extends along the first coordinate, so this
    // projection collapses to (almost) a point while staying non-degenerate.
    expect(proj12.degenerate).toBe(false);
    expect(Math.abs(proj12.hi.x - proj12.lo.x)).toBeLessThan(1e-6);
  });
});

describe("markerForDelta", () => {
  it("sits on the nominal action at delta = 0", () => {
    const proj = projectSegment(seg, [0, 1], VIEW);
    const m = markerForDelta(proj, 0, seg.gamma);
    expect(m).toEqual(proj.center);
  });

  it("reaches the endpoint at delta = gamma", () => {
    const proj = projectSegment(seg, [0, 1], VIEW);
    const m = markerForDelta(proj, seg.gamma, seg.gamma);
    expect(m.x).toBeCloseTo(proj.hi.x, 6);
  });

  it("never leaves the segment even for out-of-range deltas", () => {
    const proj = projectSegment(seg, [0, 1], VIEW);
    const m = markerForDelta(proj, 10 * seg.gamma, seg.gamma);
    expect(m.x).toBeCloseTo(proj.hi.x, 6);
  });
});

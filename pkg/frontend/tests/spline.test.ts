import { describe, expect, it } from "vitest";

import {
  deBoor,
  glyphBounds,
  playbackPath,
  samplePolyline,
  snapToCurve,
  trajectoryPolylines,
} from "../src/spline.js";
import { bezierSegment, lineSegment, singlePassTrajectory } from "./fakeService.js";

describe("deBoor", () => {
  it("interpolates the endpoints of a clamped cubic", () => {
    const seg = bezierSegment([[0, 0], [0, 1], [1, 1], [1, 0]]);
    expect(deBoor(seg, 0)).toEqual({ x: 0, y: 0 });
    expect(deBoor(seg, 1)).toEqual({ x: 1, y: 0 });
  });

  it("matches the closed-form cubic Bezier midpoint", () => {
    // B(1/2) = (P0 + 3 P1 + 3 P2 + P3) / 8
    const seg = bezierSegment([[0, 0], [0, 1], [1, 1], [1, 0]]);
    const mid = deBoor(seg, 0.5);
    expect(mid.x).toBeCloseTo(0.5, 12);
    expect(mid.y).toBeCloseTo(0.75, 12);
  });

  it("reproduces a straight line exactly", () => {
    const seg = lineSegment([1, 2], [5, 4]);
    for (const u of [0, 0.25, 0.5, 0.75, 1]) {
      const p = deBoor(seg, u);
      expect(p.x).toBeCloseTo(1 + 4 * u, 10);
      expect(p.y).toBeCloseTo(2 + 2 * u, 10);
    }
  });
});

describe("samplePolyline / glyphBounds", () => {
  it("samples start to end", () => {
    const poly = samplePolyline(lineSegment([0, 0], [2, 0]), 5);
    expect(poly[0]).toEqual({ x: 0, y: 0 });
    expect(poly[4].x).toBeCloseTo(2, 10);
  });

  it("bounds cover all segments", () => {
    const { lo, hi } = glyphBounds([
      lineSegment([0, 0], [1, 0]),
      lineSegment([1, 0], [1, 3]),
    ]);
    expect(lo.x).toBeCloseTo(0, 10);
    expect(hi.y).toBeCloseTo(3, 10);
  });
});

describe("snapToCurve", () => {
  const segments = [lineSegment([0, 0], [1, 0]), lineSegment([1, 0], [1, 1])];

  it("projects a nearby point onto the curve", () => {
    const snap = snapToCurve(segments, { x: 0.4, y: 0.03 }, 0.1);
    expect(snap).not.toBeNull();
    expect(snap!.segmentIndex).toBe(0);
    expect(snap!.point.y).toBeCloseTo(0, 9);
    expect(snap!.point.x).toBeCloseTo(0.4, 2);
  });

  it("returns null beyond the tolerance", () => {
    expect(snapToCurve(segments, { x: 0.5, y: 0.5 }, 0.1)).toBeNull();
  });
});

describe("trajectoryPolylines", () => {
  const segments = [lineSegment([0, 0], [1, 0]), lineSegment([1, 0], [1, 1])];

  it("honors pass direction", () => {
    const t = {
      provenance: "reconstructed",
      pen_strokes: [[{ segment_index: 1, reversed: true, retrace: false }]],
    };
    const [poly] = trajectoryPolylines(segments, t);
    expect(poly[0].y).toBeCloseTo(1, 10);
    expect(poly[poly.length - 1].y).toBeCloseTo(0, 10);
  });

  it("merges consecutive passes without duplicating the junction", () => {
    const [poly] = trajectoryPolylines(segments, singlePassTrajectory([0, 1]), 8);
    expect(poly.length).toBe(15); // 8 + 8 - shared point
    const dup = poly.filter((p) => Math.hypot(p.x - 1, p.y) < 1e-9);
    expect(dup.length).toBe(1);
  });
});

describe("playbackPath", () => {
  it("advances a uniform arc length per frame within each stroke", () => {
    const segments = [lineSegment([0, 0], [4, 0])];
    const frames = playbackPath(segments, singlePassTrajectory([0]), 0.5);
    const steps: number[] = [];
    for (let i = 1; i < frames.length; i++) {
      steps.push(
        Math.hypot(
          frames[i].point.x - frames[i - 1].point.x,
          frames[i].point.y - frames[i - 1].point.y,
        ),
      );
    }
    const [min, max] = [Math.min(...steps), Math.max(...steps)];
    expect(max - min).toBeLessThan(1e-9);
    expect(max).toBeLessThanOrEqual(0.5 + 1e-9);
  });

  it("marks the first frame of each pen stroke as a move-to", () => {
    const segments = [lineSegment([0, 0], [1, 0]), lineSegment([2, 0], [3, 0])];
    const t = {
      provenance: "reconstructed",
      pen_strokes: [
        [{ segment_index: 0, reversed: false, retrace: false }],
        [{ segment_index: 1, reversed: false, retrace: false }],
      ],
    };
    const frames = playbackPath(segments, t, 0.25);
    const moveTos = frames.filter((f) => !f.penDown).length;
    expect(moveTos).toBe(2);
  });
});

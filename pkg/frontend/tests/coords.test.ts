import { describe, expect, it } from "vitest";

import {
  fitViewport,
  toCanonical,
  toCanonicalDistance,
  toScreen,
  type Viewport,
} from "../src/coords.js";

const view: Viewport = { scale: 100, originX: 320, originY: 240 };

describe("screen mapping", () => {
  it("flips y: canonical up is screen up (smaller pixel y)", () => {
    const low = toScreen(view, { x: 0, y: 0 });
    const high = toScreen(view, { x: 0, y: 1 });
    expect(high.y).toBeLessThan(low.y);
    expect(high.x).toBe(low.x);
  });

  it("round-trips canonical -> screen -> canonical", () => {
    for (const p of [{ x: 0, y: 0 }, { x: 1.5, y: -2.25 }, { x: -3, y: 7 }]) {
      const back = toCanonical(view, toScreen(view, p));
      expect(back.x).toBeCloseTo(p.x, 12);
      expect(back.y).toBeCloseTo(p.y, 12);
    }
  });

  it("converts pixel tolerances to canonical units", () => {
    expect(toCanonicalDistance(view, 12)).toBeCloseTo(0.12, 12);
  });
});

describe("fitViewport", () => {
  it("maps the box inside the canvas with the margin respected", () => {
    const v = fitViewport({ x: 0, y: 0 }, { x: 2, y: 1 }, 640, 480, 20);
    for (const corner of [
      { x: 0, y: 0 },
      { x: 2, y: 0 },
      { x: 0, y: 1 },
      { x: 2, y: 1 },
    ]) {
      const s = toScreen(v, corner);
      expect(s.x).toBeGreaterThanOrEqual(20 - 1e-9);
      expect(s.x).toBeLessThanOrEqual(620 + 1e-9);
      expect(s.y).toBeGreaterThanOrEqual(20 - 1e-9);
      expect(s.y).toBeLessThanOrEqual(460 + 1e-9);
    }
  });

  it("keeps the aspect ratio (uniform scale)", () => {
    const v = fitViewport({ x: 0, y: 0 }, { x: 1, y: 1 }, 640, 480, 20);
    const a = toScreen(v, { x: 0, y: 0 });
    const b = toScreen(v, { x: 1, y: 0 });
    const c = toScreen(v, { x: 0, y: 1 });
    expect(Math.abs(b.x - a.x)).toBeCloseTo(Math.abs(a.y - c.y), 9);
  });

  it("centers the glyph", () => {
    const v = fitViewport({ x: -1, y: -1 }, { x: 1, y: 1 }, 640, 480, 20);
    const s = toScreen(v, { x: 0, y: 0 });
    expect(s.x).toBeCloseTo(320, 9);
    expect(s.y).toBeCloseTo(240, 9);
  });
});

/**
 * Client-side evaluation of the cubic B-spline segments the service stores.
 *
 * Only rendering-grade operations live here — sampling for display, snapping
 * a click to the curve, arc-length-uniform playback paths. No metric is ever
 * computed in the UI; numbers shown to the user come from service responses.
 */

import type { SegmentDict, TrajectoryDict } from "./types.js";
import type { Vec2 } from "./coords.js";

/** De Boor evaluation of one B-spline point at parameter u. */
export function deBoor(seg: SegmentDict, u: number): Vec2 {
  const { degree: p, knots: t, control_points: c } = seg;
  const lo = t[p];
  const hi = t[t.length - p - 1];
  u = Math.min(Math.max(u, lo), hi);
  // knot span index k with t[k] <= u < t[k+1]
  let k = p;
  for (let i = p; i < t.length - p - 1; i++) {
    if (u >= t[i] && u < t[i + 1]) {
      k = i;
      break;
    }
    k = i;
  }
  const d: Vec2[] = [];
  for (let j = 0; j <= p; j++) {
    const cp = c[j + k - p];
    d.push({ x: cp[0], y: cp[1] });
  }
  for (let r = 1; r <= p; r++) {
    for (let j = p; j >= r; j--) {
      const denom = t[j + 1 + k - r] - t[j + k - p];
      const alpha = denom === 0 ? 0 : (u - t[j + k - p]) / denom;
      d[j] = {
        x: (1 - alpha) * d[j - 1].x + alpha * d[j].x,
        y: (1 - alpha) * d[j - 1].y + alpha * d[j].y,
      };
    }
  }
  return d[p];
}

export function paramRange(seg: SegmentDict): [number, number] {
  const p = seg.degree;
  return [seg.knots[p], seg.knots[seg.knots.length - p - 1]];
}

/** Sample a segment as a polyline of `n` points from start to end. */
export function samplePolyline(seg: SegmentDict, n = 64): Vec2[] {
  const [lo, hi] = paramRange(seg);
  const out: Vec2[] = [];
  for (let i = 0; i < n; i++) {
    out.push(deBoor(seg, lo + ((hi - lo) * i) / (n - 1)));
  }
  return out;
}

export function glyphBounds(segments: SegmentDict[]): { lo: Vec2; hi: Vec2 } {
  const lo = { x: Infinity, y: Infinity };
  const hi = { x: -Infinity, y: -Infinity };
  for (const seg of segments) {
    for (const p of samplePolyline(seg)) {
      lo.x = Math.min(lo.x, p.x);
      lo.y = Math.min(lo.y, p.y);
      hi.x = Math.max(hi.x, p.x);
      hi.y = Math.max(hi.y, p.y);
    }
  }
  return { lo, hi };
}

export interface SnapResult {
  point: Vec2;
  segmentIndex: number;
  distance: number;
}

/**
 * Snap a canonical-space point to the nearest on-curve location, or null if
 * every segment is farther than `tolerance`.
 */
export function snapToCurve(
  segments: SegmentDict[],
  p: Vec2,
  tolerance: number,
  samplesPerSegment = 128,
): SnapResult | null {
  let best: SnapResult | null = null;
  segments.forEach((seg, si) => {
    for (const q of samplePolyline(seg, samplesPerSegment)) {
      const d = Math.hypot(q.x - p.x, q.y - p.y);
      if (best === null || d < best.distance) {
        best = { point: q, segmentIndex: si, distance: d };
      }
    }
  });
  return best !== null && (best as SnapResult).distance <= tolerance ? best : null;
}

/**
 * Flatten a trajectory into an ordered list of polylines, one per pen
 * stroke, honoring pass direction. Pen-up gaps are the boundaries between
 * the returned polylines.
 */
export function trajectoryPolylines(
  segments: SegmentDict[],
  trajectory: TrajectoryDict,
  samplesPerSegment = 64,
): Vec2[][] {
  return trajectory.pen_strokes.map((stroke) => {
    const pts: Vec2[] = [];
    for (const pass of stroke) {
      const poly = samplePolyline(segments[pass.segment_index], samplesPerSegment);
      if (pass.reversed) poly.reverse();
      // drop the duplicated junction point between consecutive passes
      pts.push(...(pts.length > 0 ? poly.slice(1) : poly));
    }
    return pts;
  });
}

/**
 * Resample a trajectory to points advancing a constant arc length per frame,
 * for animated pen playback. Playback speed is uniform in arc length; no
 * velocity model is implied.
 */
export function playbackPath(
  segments: SegmentDict[],
  trajectory: TrajectoryDict,
  arcStep: number,
): { point: Vec2; penDown: boolean }[] {
  const frames: { point: Vec2; penDown: boolean }[] = [];
  for (const poly of trajectoryPolylines(segments, trajectory)) {
    if (poly.length === 0) continue;
    const cum = [0];
    for (let i = 1; i < poly.length; i++) {
      cum.push(cum[i - 1] + Math.hypot(poly[i].x - poly[i - 1].x, poly[i].y - poly[i - 1].y));
    }
    const total = cum[cum.length - 1];
    const n = Math.max(2, Math.ceil(total / arcStep) + 1);
    let j = 0;
    for (let f = 0; f < n; f++) {
      const s = (total * f) / (n - 1);
      while (j < poly.length - 2 && cum[j + 1] < s) j++;
      const span = cum[j + 1] - cum[j];
      const a = span === 0 ? 0 : (s - cum[j]) / span;
      frames.push({
        point: {
          x: poly[j].x + a * (poly[j + 1].x - poly[j].x),
          y: poly[j].y + a * (poly[j + 1].y - poly[j].y),
        },
        // the first frame of each stroke is a move-to (pen in the air)
        penDown: f > 0,
      });
    }
  }
  return frames;
}

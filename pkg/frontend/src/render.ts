/**
 * Canvas rendering of a glyph: spline segments, landmarks (color-coded by
 * kind, shape-coded auto/manual), the chosen trajectory with direction
 * arrows, and the animated playback cursor.
 *
 * Drawing goes through the `Draw2D` subset of CanvasRenderingContext2D so
 * tests can substitute a recording context.
 */

import type { GlyphResponse, LandmarkDict, TrajectoryDict } from "./types.js";
import { toScreen, type Vec2, type Viewport } from "./coords.js";
import { samplePolyline, trajectoryPolylines } from "./spline.js";

export interface Draw2D {
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  rect(x: number, y: number, w: number, h: number): void;
  stroke(): void;
  fill(): void;
  clearRect(x: number, y: number, w: number, h: number): void;
}

export const LANDMARK_COLORS: Record<string, string> = {
  curvature_extremum: "#d81b60",
  sharp_junction: "#1e88e5",
  pen_event: "#43a047",
};
const LANDMARK_FALLBACK_COLOR = "#757575";
const SEGMENT_COLOR = "#222";
const TRAJECTORY_COLOR = "#fb8c00";
const CURSOR_COLOR = "#6a1b9a";

function strokePolyline(ctx: Draw2D, view: Viewport, poly: Vec2[]): void {
  ctx.beginPath();
  poly.forEach((p, i) => {
    const s = toScreen(view, p);
    if (i === 0) ctx.moveTo(s.x, s.y);
    else ctx.lineTo(s.x, s.y);
  });
  ctx.stroke();
}

export function drawSegments(
  ctx: Draw2D,
  view: Viewport,
  glyph: Pick<GlyphResponse, "segments">,
): void {
  ctx.strokeStyle = SEGMENT_COLOR;
  ctx.lineWidth = 2;
  for (const seg of glyph.segments) {
    strokePolyline(ctx, view, samplePolyline(seg));
  }
}

export function drawLandmarks(
  ctx: Draw2D,
  view: Viewport,
  landmarks: LandmarkDict[],
  radiusPx = 5,
): void {
  for (const lm of landmarks) {
    const s = toScreen(view, { x: lm.location[0], y: lm.location[1] });
    ctx.fillStyle = LANDMARK_COLORS[lm.kind] ?? LANDMARK_FALLBACK_COLOR;
    ctx.beginPath();
    if (lm.source === "manual") {
      // manual overrides are squares, automatic detections are circles
      ctx.rect(s.x - radiusPx, s.y - radiusPx, 2 * radiusPx, 2 * radiusPx);
    } else {
      ctx.arc(s.x, s.y, radiusPx, 0, 2 * Math.PI);
    }
    ctx.fill();
  }
}

function drawArrowHead(ctx: Draw2D, from: Vec2, to: Vec2, sizePx: number): void {
  const ang = Math.atan2(to.y - from.y, to.x - from.x);
  ctx.beginPath();
  ctx.moveTo(to.x, to.y);
  ctx.lineTo(
    to.x - sizePx * Math.cos(ang - Math.PI / 6),
    to.y - sizePx * Math.sin(ang - Math.PI / 6),
  );
  ctx.moveTo(to.x, to.y);
  ctx.lineTo(
    to.x - sizePx * Math.cos(ang + Math.PI / 6),
    to.y - sizePx * Math.sin(ang + Math.PI / 6),
  );
  ctx.stroke();
}

export function drawTrajectory(
  ctx: Draw2D,
  view: Viewport,
  glyph: Pick<GlyphResponse, "segments">,
  trajectory: TrajectoryDict,
): void {
  ctx.strokeStyle = TRAJECTORY_COLOR;
  ctx.lineWidth = 1.5;
  for (const poly of trajectoryPolylines(glyph.segments, trajectory)) {
    strokePolyline(ctx, view, poly);
    // one direction arrow at the midpoint of each pen stroke
    const m = Math.floor(poly.length / 2);
    if (m > 0) {
      drawArrowHead(ctx, toScreen(view, poly[m - 1]), toScreen(view, poly[m]), 8);
    }
  }
}

export function drawPlaybackCursor(ctx: Draw2D, view: Viewport, at: Vec2): void {
  const s = toScreen(view, at);
  ctx.fillStyle = CURSOR_COLOR;
  ctx.beginPath();
  ctx.arc(s.x, s.y, 4, 0, 2 * Math.PI);
  ctx.fill();
}

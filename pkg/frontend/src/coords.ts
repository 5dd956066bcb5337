/**
 * Boundary layer between canonical glyph space (y grows upward) and canvas
 * screen space (y grows downward). All y-flipping lives here; everything
 * above this module speaks canonical coordinates, everything below speaks
 * pixels.
 */

export interface Vec2 {
  x: number;
  y: number;
}

export interface Viewport {
  /** Pixels per canonical unit. */
  scale: number;
  /** Screen position of the canonical origin. */
  originX: number;
  originY: number;
}

/** Fit a canonical bounding box into a canvas with uniform scale and margin. */
export function fitViewport(
  lo: Vec2,
  hi: Vec2,
  canvasWidth: number,
  canvasHeight: number,
  marginPx = 20,
): Viewport {
  const w = Math.max(hi.x - lo.x, 1e-9);
  const h = Math.max(hi.y - lo.y, 1e-9);
  const scale = Math.min(
    (canvasWidth - 2 * marginPx) / w,
    (canvasHeight - 2 * marginPx) / h,
  );
  // center the box; originY maps canonical y=0 accounting for the flip
  const cx = (lo.x + hi.x) / 2;
  const cy = (lo.y + hi.y) / 2;
  return {
    scale,
    originX: canvasWidth / 2 - cx * scale,
    originY: canvasHeight / 2 + cy * scale,
  };
}

export function toScreen(v: Viewport, p: Vec2): Vec2 {
  return { x: v.originX + p.x * v.scale, y: v.originY - p.y * v.scale };
}

export function toCanonical(v: Viewport, p: Vec2): Vec2 {
  return { x: (p.x - v.originX) / v.scale, y: (v.originY - p.y) / v.scale };
}

/** Convert a screen-space pixel tolerance into canonical units. */
export function toCanonicalDistance(v: Viewport, px: number): number {
  return px / v.scale;
}

/**
 * Freehand capture for draw mode. Pointer events arrive in screen space
 * (y-down); the capture converts them at the boundary so the rest of the app
 * only ever sees canonical y-up polylines, ready to submit once the service
 * grows a glyph-insertion endpoint.
 */

import { toCanonical, type Vec2, type Viewport } from "./coords.js";

export class FreehandCapture {
  private current: Vec2[] | null = null;
  readonly polylines: Vec2[][] = [];

  constructor(private readonly view: Viewport) {}

  penDown(screen: Vec2): void {
    this.current = [toCanonical(this.view, screen)];
  }

  penMove(screen: Vec2): void {
    this.current?.push(toCanonical(this.view, screen));
  }

  penUp(): void {
    if (this.current !== null && this.current.length >= 2) {
      this.polylines.push(this.current);
    }
    this.current = null;
  }

  clear(): void {
    this.polylines.length = 0;
    this.current = null;
  }
}

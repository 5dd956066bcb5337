/**
 * Orchestrates the annotate loop: one ViewState, one client, at most one
 * in-flight mutation. Every displayed metric comes from a server response;
 * conflicts surface a banner and keep the local edit for retry.
 */

import { AnnotationClient, ConflictError } from "./client.js";
import {
  applyGlyphResponse,
  hoverCandidate,
  initialState,
  recordConflict,
  setCandidates,
  setMode,
  type EditMode,
  type ViewState,
} from "./state.js";
import { snapToCurve } from "./spline.js";
import type { Vec2 } from "./coords.js";

export class AnnotatorController {
  state: ViewState = initialState();

  constructor(private readonly client: AnnotationClient) {}

  async selectGlyph(id: string): Promise<void> {
    this.state = applyGlyphResponse(this.state, await this.client.getGlyph(id));
  }

  /** Refetch after a conflict; the pending edit stays available for retry. */
  async reload(): Promise<void> {
    const id = this.state.selectedGlyphId;
    if (id !== null) {
      const glyph = await this.client.getGlyph(id);
      this.state = { ...applyGlyphResponse(this.state, glyph) };
    }
  }

  async runReconstruction(top = 5): Promise<void> {
    const id = this.requireGlyph();
    try {
      const res = await this.client.reconstruct(id, top);
      this.state = setCandidates(this.state, res.candidates, res.revision);
    } catch (e) {
      this.handleMutationError(e, "reconstruct");
    }
  }

  hover(index: number | null): void {
    this.state = hoverCandidate(this.state, index);
  }

  /** Commit a candidate; on success the metric panel reflects the response. */
  async commitCandidate(index: number): Promise<void> {
    const id = this.requireGlyph();
    try {
      const glyph = await this.client.selectCandidate(id, index);
      this.state = applyGlyphResponse(this.state, glyph);
    } catch (e) {
      this.handleMutationError(e, `select candidate ${index}`);
    }
  }

  setMode(mode: EditMode): void {
    this.state = setMode(this.state, mode);
  }

  /**
   * Handle a click in canonical coordinates according to the current edit
   * mode. Add mode snaps to the nearest on-curve point within `tolerance`
   * (canonical units); a miss is a no-op returning false so the shell can
   * show a hint. Remove mode deletes the nearest landmark within tolerance.
   */
  async clickAt(p: Vec2, tolerance: number): Promise<boolean> {
    const glyph = this.state.glyph;
    if (glyph === null) return false;
    if (this.state.mode === "add") {
      const snap = snapToCurve(glyph.segments, p, tolerance);
      if (snap === null) return false;
      await this.patchLandmarks({ add: [{ location: [snap.point.x, snap.point.y] }] });
      return true;
    }
    if (this.state.mode === "remove") {
      let best = -1;
      let bestD = Infinity;
      glyph.landmarks.forEach((lm, i) => {
        const d = Math.hypot(lm.location[0] - p.x, lm.location[1] - p.y);
        if (d < bestD) {
          bestD = d;
          best = i;
        }
      });
      if (best < 0 || bestD > tolerance) return false;
      await this.patchLandmarks({ remove: [best] });
      return true;
    }
    return false;
  }

  private async patchLandmarks(edits: {
    add?: { location: [number, number] }[];
    remove?: number[];
  }): Promise<void> {
    const id = this.requireGlyph();
    try {
      const glyph = await this.client.editLandmarks(id, edits);
      this.state = applyGlyphResponse(this.state, glyph);
    } catch (e) {
      this.handleMutationError(e, "edit landmarks");
    }
  }

  async save(): Promise<void> {
    try {
      await this.client.save();
    } catch (e) {
      this.handleMutationError(e, "save");
    }
  }

  private requireGlyph(): string {
    const id = this.state.selectedGlyphId;
    if (id === null) throw new Error("no glyph selected");
    return id;
  }

  private handleMutationError(e: unknown, description: string): void {
    if (e instanceof ConflictError) {
      this.state = recordConflict(this.state, e.detail.expected, description);
      return;
    }
    throw e;
  }
}

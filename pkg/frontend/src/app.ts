/**
 * Browser shell: wires the controller to a canvas, a glyph list, a candidate
 * list and a metric panel. All logic lives in the imported modules; this file
 * is DOM plumbing only.
 */

import { AnnotationClient } from "./client.js";
import { AnnotatorController } from "./controller.js";
import { fitViewport, toCanonical, toCanonicalDistance, type Viewport } from "./coords.js";
import {
  drawLandmarks,
  drawPlaybackCursor,
  drawSegments,
  drawTrajectory,
} from "./render.js";
import { advancePlayback } from "./state.js";
import { glyphBounds, playbackPath } from "./spline.js";

const SNAP_TOLERANCE_PX = 12;
const PLAYBACK_ARC_FRACTION = 0.01;

export async function main(root: HTMLElement, baseUrl: string): Promise<void> {
  const client = new AnnotationClient(baseUrl);
  const controller = new AnnotatorController(client);

  root.innerHTML = `
    <div class="banner" hidden></div>
    <ul class="glyph-list"></ul>
    <canvas width="640" height="480"></canvas>
    <div class="modes">
      <button data-mode="view">view</button>
      <button data-mode="add">add landmark</button>
      <button data-mode="remove">remove landmark</button>
      <button class="save">save</button>
    </div>
    <ol class="candidates"></ol>
    <dl class="metrics"></dl>
  `;
  const banner = root.querySelector<HTMLElement>(".banner")!;
  const list = root.querySelector<HTMLElement>(".glyph-list")!;
  const canvas = root.querySelector<HTMLCanvasElement>("canvas")!;
  const candidatesEl = root.querySelector<HTMLElement>(".candidates")!;
  const metricsEl = root.querySelector<HTMLElement>(".metrics")!;
  const ctx = canvas.getContext("2d")!;
  let view: Viewport | null = null;

  function redraw(): void {
    const s = controller.state;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    banner.hidden = s.conflictBanner === null;
    banner.textContent = s.conflictBanner ?? "";
    if (s.glyph === null) return;
    const { lo, hi } = glyphBounds(s.glyph.segments);
    view = fitViewport(lo, hi, canvas.width, canvas.height);
    drawSegments(ctx, view, s.glyph);
    const previewed =
      s.hoveredCandidate !== null
        ? s.candidates[s.hoveredCandidate]?.trajectory
        : s.glyph.trajectory;
    if (previewed) drawTrajectory(ctx, view, s.glyph, previewed);
    drawLandmarks(ctx, view, s.glyph.landmarks);
    if (s.hoveredCandidate !== null && s.candidates[s.hoveredCandidate]) {
      const diag = Math.hypot(hi.x - lo.x, hi.y - lo.y);
      const frames = playbackPath(
        s.glyph.segments,
        s.candidates[s.hoveredCandidate].trajectory,
        diag * PLAYBACK_ARC_FRACTION,
      );
      if (frames.length > 0) {
        drawPlaybackCursor(ctx, view, frames[s.playbackFrame % frames.length].point);
        controller.state = advancePlayback(controller.state, frames.length);
        requestAnimationFrame(redraw);
      }
    }
    renderMetrics();
    renderCandidates();
  }

  function renderMetrics(): void {
    const panel = controller.state.metricPanel;
    metricsEl.innerHTML = "";
    if (panel === null) return;
    for (const [name, value] of Object.entries(panel)) {
      const dt = document.createElement("dt");
      dt.textContent = name;
      const dd = document.createElement("dd");
      dd.textContent = value === null ? "—" : String(value);
      metricsEl.append(dt, dd);
    }
  }

  function renderCandidates(): void {
    const s = controller.state;
    candidatesEl.innerHTML = "";
    if (s.candidates.length === 0) {
      const cta = document.createElement("button");
      cta.textContent = "run reconstruction";
      cta.onclick = async () => {
        await controller.runReconstruction();
        redraw();
      };
      candidatesEl.append(cta);
      return;
    }
    s.candidates.forEach((c) => {
      const li = document.createElement("li");
      li.textContent = `#${c.index} score ${c.score.toFixed(3)} (${c.pen_strokes} strokes)`;
      li.onmouseenter = () => {
        controller.hover(c.index);
        redraw();
      };
      li.onmouseleave = () => {
        controller.hover(null);
        redraw();
      };
      li.onclick = async () => {
        await controller.commitCandidate(c.index);
        redraw();
      };
      candidatesEl.append(li);
    });
  }

  canvas.addEventListener("click", async (ev) => {
    if (view === null) return;
    const rect = canvas.getBoundingClientRect();
    const p = toCanonical(view, { x: ev.clientX - rect.left, y: ev.clientY - rect.top });
    const hit = await controller.clickAt(p, toCanonicalDistance(view, SNAP_TOLERANCE_PX));
    if (!hit && controller.state.mode !== "view") {
      banner.hidden = false;
      banner.textContent = "click closer to the curve";
      return;
    }
    redraw();
  });

  root.querySelectorAll<HTMLButtonElement>("[data-mode]").forEach((b) => {
    b.onclick = () => controller.setMode(b.dataset.mode as "view" | "add" | "remove");
  });
  root.querySelector<HTMLButtonElement>(".save")!.onclick = async () => {
    await controller.save();
    redraw();
  };

  const corpus = await client.getCorpus();
  for (const g of corpus.glyphs) {
    const li = document.createElement("li");
    li.textContent = `${g.id}${g.label ? ` (${g.label})` : ""}`;
    li.onclick = async () => {
      await controller.selectGlyph(g.id);
      redraw();
    };
    list.append(li);
  }
}

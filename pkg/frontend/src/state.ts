/**
 * View state for the annotator: which glyph is selected, the candidate list
 * with its playback cursor, the landmark-edit mode, and the metric panel.
 *
 * Transitions are pure functions so the UI shell can stay a thin event loop.
 * The metric panel is only ever replaced wholesale from a server response;
 * nothing in the UI computes or adjusts a metric value.
 */

import type { CandidateDict, GlyphResponse, MetricPanel } from "./types.js";

export type EditMode = "view" | "add" | "remove";

export interface ViewState {
  selectedGlyphId: string | null;
  glyph: GlyphResponse | null;
  candidates: CandidateDict[];
  /** Candidate being previewed by hover, or null. */
  hoveredCandidate: number | null;
  /** Frame index of the animated pen cursor for the hovered candidate. */
  playbackFrame: number;
  mode: EditMode;
  metricPanel: MetricPanel | null;
  /** Revision of the last server response this state reflects. */
  acknowledgedRevision: number;
  /** Set when the server rejected a mutation as stale; cleared by refetch. */
  conflictBanner: string | null;
  /** A rejected edit kept around so the user can retry after refetching. */
  pendingRetry: { description: string } | null;
}

export function initialState(): ViewState {
  return {
    selectedGlyphId: null,
    glyph: null,
    candidates: [],
    hoveredCandidate: null,
    playbackFrame: 0,
    mode: "view",
    metricPanel: null,
    acknowledgedRevision: -1,
    conflictBanner: null,
    pendingRetry: null,
  };
}

/** Apply a full glyph response (from GET, PUT trajectory, or PATCH landmarks). */
export function applyGlyphResponse(state: ViewState, glyph: GlyphResponse): ViewState {
  return {
    ...state,
    selectedGlyphId: glyph.id,
    glyph,
    metricPanel: glyph.metrics,
    acknowledgedRevision: glyph.revision,
    conflictBanner: null,
  };
}

export function setCandidates(
  state: ViewState,
  candidates: CandidateDict[],
  revision: number,
): ViewState {
  return {
    ...state,
    candidates,
    hoveredCandidate: null,
    playbackFrame: 0,
    acknowledgedRevision: revision,
  };
}

/** Hovering previews a candidate locally; it never mutates the server. */
export function hoverCandidate(state: ViewState, index: number | null): ViewState {
  return { ...state, hoveredCandidate: index, playbackFrame: 0 };
}

export function advancePlayback(state: ViewState, totalFrames: number): ViewState {
  if (state.hoveredCandidate === null || totalFrames <= 0) return state;
  return { ...state, playbackFrame: (state.playbackFrame + 1) % totalFrames };
}

export function setMode(state: ViewState, mode: EditMode): ViewState {
  return { ...state, mode };
}

/**
 * Record a rejected mutation. The local edit is preserved for retry and a
 * banner tells the user to reload; the previous glyph view stays rendered so
 * nothing is silently overwritten.
 */
export function recordConflict(
  state: ViewState,
  serverRevision: number,
  description: string,
): ViewState {
  return {
    ...state,
    conflictBanner:
      `The corpus changed on the server (now at revision ${serverRevision}). ` +
      "Reload to continue; your edit was kept for retry.",
    pendingRetry: { description },
  };
}

export function clearRetry(state: ViewState): ViewState {
  return { ...state, pendingRetry: null };
}

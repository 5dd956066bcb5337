/**
 * Typed client for the annotation service with optimistic-revision tracking.
 *
 * The client remembers the last revision the server acknowledged and stamps
 * it onto every mutation. A 409 response raises `ConflictError` carrying the
 * server's expected revision so the caller can refetch and retry; local state
 * is never silently overwritten. At most one mutation may be in flight.
 */

import type {
  ConflictDetail,
  CorpusResponse,
  GlyphResponse,
  ReconstructResponse,
  TrajectoryDict,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ConflictError extends Error {
  constructor(public readonly detail: ConflictDetail) {
    super(`revision conflict: server at ${detail.expected}, sent ${detail.got}`);
    this.name = "ConflictError";
  }
}

export class ApiError extends Error {
  constructor(public readonly status: number, detail: unknown) {
    super(`HTTP ${status}: ${JSON.stringify(detail)}`);
    this.name = "ApiError";
  }
}

export interface LandmarkAdd {
  location: [number, number];
  kind?: string;
}

export class AnnotationClient {
  /** Last revision acknowledged by the server; -1 until the first response. */
  revision = -1;
  private mutationInFlight = false;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(this.baseUrl + path, init);
    const body = await res.json().catch(() => null);
    if (res.status === 409) {
      throw new ConflictError((body as { detail: ConflictDetail }).detail);
    }
    if (!res.ok) {
      throw new ApiError(res.status, (body as { detail?: unknown })?.detail ?? body);
    }
    const payload = body as T & { revision?: number };
    if (typeof payload.revision === "number") {
      this.revision = payload.revision;
    }
    return payload;
  }

  private async mutate<T>(path: string, method: string, body: object): Promise<T> {
    if (this.mutationInFlight) {
      throw new Error("a mutation is already in flight");
    }
    this.mutationInFlight = true;
    try {
      return await this.request<T>(path, {
        method,
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ revision: this.revision, ...body }),
      });
    } finally {
      this.mutationInFlight = false;
    }
  }

  getCorpus(): Promise<CorpusResponse> {
    return this.request<CorpusResponse>("/corpus");
  }

  getGlyph(id: string): Promise<GlyphResponse> {
    return this.request<GlyphResponse>(`/glyphs/${encodeURIComponent(id)}`);
  }

  reconstruct(id: string, top = 5): Promise<ReconstructResponse> {
    return this.mutate<ReconstructResponse>(
      `/glyphs/${encodeURIComponent(id)}/reconstruct`,
      "POST",
      { top },
    );
  }

  /** Commit one of the server-stored candidates as the chosen trajectory. */
  selectCandidate(id: string, candidateIndex: number): Promise<GlyphResponse> {
    return this.mutate<GlyphResponse>(
      `/glyphs/${encodeURIComponent(id)}/trajectory`,
      "PUT",
      { candidate_index: candidateIndex },
    );
  }

  putTrajectory(id: string, trajectory: TrajectoryDict): Promise<GlyphResponse> {
    return this.mutate<GlyphResponse>(
      `/glyphs/${encodeURIComponent(id)}/trajectory`,
      "PUT",
      { trajectory },
    );
  }

  editLandmarks(
    id: string,
    edits: { add?: LandmarkAdd[]; remove?: number[] },
  ): Promise<GlyphResponse> {
    return this.mutate<GlyphResponse>(
      `/glyphs/${encodeURIComponent(id)}/landmarks`,
      "PATCH",
      { add: edits.add ?? [], remove: edits.remove ?? [] },
    );
  }

  save(): Promise<{ revision: number; path: string; dirty: boolean }> {
    return this.mutate("/save", "POST", {});
  }
}

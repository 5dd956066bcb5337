/** Payload shapes exchanged with the annotation service. */

export interface SegmentDict {
  degree: number;
  control_points: [number, number][];
  knots: number[];
}

export interface DirectedPassDict {
  segment_index: number;
  reversed: boolean;
  retrace: boolean;
}

export interface TrajectoryDict {
  provenance: string;
  pen_strokes: DirectedPassDict[][];
}

export interface LandmarkDict {
  location: [number, number];
  kind: string;
  source: string;
}

export interface CandidateDict {
  index: number;
  score: number;
  breakdown: Record<string, number>;
  pen_strokes: number;
  trajectory: TrajectoryDict;
}

/** Flat metric table as computed server-side; null marks an undefined metric. */
export type MetricPanel = Record<string, number | string | null>;

export interface GlyphSummary {
  id: string;
  label: string | null;
  n_segments: number;
  has_trajectory: boolean;
  n_candidates: number;
}

export interface CorpusResponse {
  revision: number;
  dirty: boolean;
  id: string;
  name: string;
  baseline_y: number | null;
  glyphs: GlyphSummary[];
}

export interface GlyphResponse {
  revision: number;
  id: string;
  script_id: string;
  label: string | null;
  baseline_y: number | null;
  usage_frequency: number | null;
  segments: SegmentDict[];
  trajectory: TrajectoryDict | null;
  candidates: TrajectoryDict[];
  landmarks: LandmarkDict[];
  manual_landmarks: LandmarkDict[];
  metrics: MetricPanel | null;
  metric_reasons?: Record<string, string>;
}

export interface ReconstructResponse {
  revision: number;
  candidates: CandidateDict[];
}

export interface ConflictDetail {
  expected: number;
  got: number;
}

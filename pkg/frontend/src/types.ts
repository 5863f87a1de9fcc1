/**
 * Payload types for the /v1 HTTP API. The UI renders these verbatim; it never
 * recomputes model numbers client-side.
 */

export type Envelope<T> =
  | { ok: true; data: T }
  | { ok: false; error: ApiError };

export interface ApiError {
  code: string;
  message: string;
  detail?: unknown;
}

export type MixtureQuantities = Record<string, number>;

export interface CampaignState {
  id: string;
  created_at: string;
  observations: { total: number; measured: number };
  batches: BatchSummary[];
  snapshot_digest: string | null;
  snapshot_errors: string[];
  frontier_hypervolumes: Record<string, number>;
  objective_spec: { ages: number[]; reference_point: number[] };
  constraints: ConstraintsPayload;
  novelty_distance: number;
}

export interface BatchSummary {
  batch_id: string;
  origin: "human" | "ai";
  size: number;
  created_at: string;
  snapshot_digest: string | null;
}

export interface ConstraintsPayload {
  bounds: Record<string, [number, number]>;
  linear: { name: string; coefficients: Record<string, number>; lo: number | null; hi: number | null }[];
  exclude: string[];
}

export interface EmpiricalPoint {
  strength_mpa: number;
  gwp_kgco2e_m3: number;
  mixture: MixtureQuantities;
  batch_id: string | null;
  dominated: boolean;
  origin?: "human" | "ai";
}

export interface EmpiricalFrontierPayload {
  age_days: number;
  points: EmpiricalPoint[];
  hypervolume: number;
}

export interface InferredPoint {
  objectives: [number, number, number]; // strength@age1, strength@age2, -gwp
  sd: [number, number, number];
  mixture: MixtureQuantities;
}

export interface InferredFrontierPayload {
  scenario: Scenario;
  seed: number;
  points: InferredPoint[];
}

/** Scenario body documented by the inferred-pareto endpoint. */
export interface Scenario {
  exclude?: string[];
  wb_window?: [number, number];
  binder_window?: [number, number];
  bounds?: Record<string, [number, number]>;
  gwp_scale?: number;
}

export interface ProposeResponse {
  job_id: string;
  status: string;
}

export interface JobPayload {
  job_id: string;
  campaign_id: string;
  status: "pending" | "running" | "done" | "failed";
  batch?: BatchPayload;
  error?: ApiError;
}

export interface BatchPayload {
  batch_id: string;
  origin: "human" | "ai";
  mixtures: MixtureQuantities[];
  created_at: string;
  seed: number | null;
  acquisition_value: number | null;
  predicted: { means: number[][]; sds: number[][] } | null;
  snapshot_digest: string | null;
}

export interface IngestReportPayload {
  report: {
    n_rows: number;
    n_accepted: number;
    errors: { line: number; message: string }[];
  };
  appended: number;
}

export const INGREDIENTS = [
  "cement",
  "fly_ash",
  "slag",
  "water",
  "fine_aggregate",
  "coarse_aggregate",
  "superplasticizer",
] as const;

export type Ingredient = (typeof INGREDIENTS)[number];

/**
 * Thin client for the /v1 API. Unwraps the response envelope and surfaces
 * error payloads as ApiRequestError so callers can show row diagnostics,
 * infeasibility certificates, etc.
 */

import type {
  BatchPayload,
  CampaignState,
  EmpiricalFrontierPayload,
  Envelope,
  InferredFrontierPayload,
  IngestReportPayload,
  JobPayload,
  ProposeResponse,
  Scenario,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail?: unknown,
  ) {
    super(message);
  }
}

export interface RequestOptions {
  idempotencyKey?: string;
  signal?: AbortSignal;
}

async function unwrap<T>(resp: Response): Promise<T> {
  const body = (await resp.json()) as Envelope<T>;
  if (!body.ok) {
    throw new ApiRequestError(resp.status, body.error.code, body.error.message, body.error.detail);
  }
  return body.data;
}

export class MixoptClient {
  constructor(private baseUrl: string = "") {}

  private headers(options?: RequestOptions): Record<string, string> {
    const headers: Record<string, string> = {};
    if (options?.idempotencyKey) headers["Idempotency-Key"] = options.idempotencyKey;
    return headers;
  }

  async listCampaigns(): Promise<string[]> {
    const resp = await fetch(`${this.baseUrl}/v1/campaigns`);
    const data = await unwrap<{ campaigns: string[] }>(resp);
    return data.campaigns;
  }

  async state(campaignId: string): Promise<CampaignState> {
    const resp = await fetch(`${this.baseUrl}/v1/campaigns/${campaignId}/state`);
    return unwrap(resp);
  }

  async postMeasurements(
    campaignId: string,
    rows: Record<string, unknown>[],
    batch?: string,
    options?: RequestOptions,
  ): Promise<IngestReportPayload> {
    const resp = await fetch(`${this.baseUrl}/v1/campaigns/${campaignId}/measurements`, {
      method: "POST",
      headers: { "content-type": "application/json", ...this.headers(options) },
      body: JSON.stringify({ rows, batch }),
    });
    return unwrap(resp);
  }

  async propose(
    campaignId: string,
    q: number,
    seed: number,
    options?: RequestOptions,
  ): Promise<ProposeResponse> {
    const resp = await fetch(`${this.baseUrl}/v1/campaigns/${campaignId}/propose`, {
      method: "POST",
      headers: { "content-type": "application/json", ...this.headers(options) },
      body: JSON.stringify({ q, seed }),
    });
    return unwrap(resp);
  }

  async job(jobId: string): Promise<JobPayload> {
    const resp = await fetch(`${this.baseUrl}/v1/jobs/${jobId}`);
    return unwrap(resp);
  }

  async pollJob(jobId: string, intervalMs = 1500, timeoutMs = 600_000): Promise<BatchPayload> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const job = await this.job(jobId);
      if (job.status === "done" && job.batch) return job.batch;
      if (job.status === "failed") {
        throw new ApiRequestError(200, job.error?.code ?? "proposal_failed",
          job.error?.message ?? "proposal failed");
      }
      if (Date.now() > deadline) throw new Error(`job ${jobId} timed out`);
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }

  async empiricalFrontier(campaignId: string, age: number): Promise<EmpiricalFrontierPayload> {
    const resp = await fetch(
      `${this.baseUrl}/v1/campaigns/${campaignId}/pareto/empirical?age=${age}`,
    );
    return unwrap(resp);
  }

  async inferredFrontier(
    campaignId: string,
    scenario: Scenario,
    seed = 0,
    nCandidates = 20_000,
    options?: RequestOptions,
  ): Promise<InferredFrontierPayload> {
    const resp = await fetch(`${this.baseUrl}/v1/campaigns/${campaignId}/pareto/inferred`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ scenario, seed, n_candidates: nCandidates }),
      signal: options?.signal,
    });
    return unwrap(resp);
  }
}

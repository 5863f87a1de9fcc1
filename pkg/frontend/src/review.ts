/**
 * Batch review: table rows for a proposed batch with predicted strengths and
 * GWP, staleness detection against new measurements, and a printable mix
 * sheet for the lab bench.
 */

import type { BatchPayload, CampaignState, MixtureQuantities } from "./types.js";
import { INGREDIENTS } from "./types.js";

export interface ReviewRow {
  index: number;
  mixture: MixtureQuantities;
  predicted1d: { mean: number; sd: number };
  predicted28d: { mean: number; sd: number };
  gwp: number;
}

export function reviewRows(batch: BatchPayload): ReviewRow[] {
  const predicted = batch.predicted;
  return batch.mixtures.map((mixture, index) => {
    const means = predicted?.means[index] ?? [NaN, NaN, NaN];
    const sds = predicted?.sds[index] ?? [NaN, NaN, NaN];
    return {
      index,
      mixture,
      predicted1d: { mean: means[0] ?? NaN, sd: sds[0] ?? NaN },
      predicted28d: { mean: means[1] ?? NaN, sd: sds[1] ?? NaN },
      gwp: -(means[2] ?? NaN),
    };
  });
}

/**
 * A job's batch is stale when the campaign has a newer model snapshot than
 * the one the proposal was computed from (new data arrived since).
 */
export function isStale(batch: BatchPayload, state: CampaignState): boolean {
  if (!batch.snapshot_digest || !state.snapshot_digest) return false;
  return batch.snapshot_digest !== state.snapshot_digest;
}

/** Plain-text mix sheet (kg/m^3) for printing. */
export function mixSheet(batch: BatchPayload): string {
  const lines: string[] = [];
  lines.push(`Batch ${batch.batch_id} (${batch.origin}), proposed ${batch.created_at}`);
  lines.push("");
  batch.mixtures.forEach((mixture, i) => {
    lines.push(`Mix ${i + 1}`);
    for (const name of INGREDIENTS) {
      const v = mixture[name] ?? 0;
      if (v > 0) {
        lines.push(`  ${name.replace(/_/g, " ").padEnd(18)} ${v.toFixed(1)} kg/m3`);
      }
    }
    lines.push("");
  });
  return lines.join("\n");
}

/** Pre-populate the measurement entry form with the accepted batch's mixes. */
export function measurementPrefill(batch: BatchPayload): MixtureQuantities[] {
  return batch.mixtures.map((m) => ({ ...m }));
}

/**
 * View models for the frontier charts. The non-dominated flags come straight
 * from the API payloads; the only client-side work is unit-faithful reshaping
 * for display (the chart wants GWP on the x-axis in kg CO2e/m^3, positive).
 */

import type {
  EmpiricalFrontierPayload,
  InferredFrontierPayload,
  MixtureQuantities,
} from "./types.js";

export interface FrontierPoint {
  gwp: number; // kg CO2e per m^3, positive for display
  strength: number; // MPa at the selected age
  sd: number; // strength band, 0 for measured points
  origin: "human" | "ai" | "inferred";
  dominated: boolean;
  mixture: MixtureQuantities;
  batchId: string | null;
}

export interface FrontierSeries {
  label: string;
  ageDays: number;
  points: FrontierPoint[];
  axes: { x: string; y: string };
}

const AXES = { x: "GWP (kgCO2e/m³)", y: "strength (MPa)" };

export function empiricalSeries(payload: EmpiricalFrontierPayload): FrontierSeries {
  return {
    label: `measured, day ${payload.age_days}`,
    ageDays: payload.age_days,
    axes: AXES,
    points: payload.points.map((p) => ({
      gwp: p.gwp_kgco2e_m3,
      strength: p.strength_mpa,
      sd: 0,
      origin: p.origin ?? "human",
      dominated: p.dominated,
      mixture: p.mixture,
      batchId: p.batch_id,
    })),
  };
}

/**
 * Inferred payload points are all non-dominated in the 3-objective sense.
 * For a single-age display the other strength coordinate is dropped, which
 * can make some points LOOK dominated in 2-d; they are still rendered as
 * frontier members because the server says so (display filtering only).
 */
export function inferredSeries(
  payload: InferredFrontierPayload,
  age: 1 | 28,
  label: string,
): FrontierSeries {
  const idx = age === 1 ? 0 : 1;
  return {
    label,
    ageDays: age,
    axes: AXES,
    points: payload.points.map((p) => ({
      gwp: -p.objectives[2],
      strength: p.objectives[idx],
      sd: p.sd[idx],
      origin: "inferred",
      dominated: false,
      mixture: p.mixture,
      batchId: null,
    })),
  };
}

export function frontierPoints(series: FrontierSeries): FrontierPoint[] {
  return series.points.filter((p) => !p.dominated);
}

export function dominatedPoints(series: FrontierSeries): FrontierPoint[] {
  return series.points.filter((p) => p.dominated);
}

/** Composition summary for the drill-down panel, largest quantities first. */
export function describeMixture(mixture: MixtureQuantities): string {
  return Object.entries(mixture)
    .filter(([, v]) => v > 0)
    .sort((a, b) => b[1] - a[1])
    .map(([k, v]) => `${k.replace(/_/g, " ")} ${v.toFixed(1)} kg/m³`)
    .join(", ");
}

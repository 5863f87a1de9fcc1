/**
 * Measurement entry: client-side row validation mirroring the server schema,
 * payload building, and rendering of the per-row server report. Invalid rows
 * never leave the browser.
 */

import { INGREDIENTS, type IngestReportPayload, type MixtureQuantities } from "./types.js";

export interface MeasurementRow {
  quantities: MixtureQuantities;
  age_days: string; // raw form values; validation parses them
  strength: string;
  strength_unit: "MPa" | "psi";
  replicate: string;
}

export interface RowIssue {
  field: string;
  message: string;
}

export function emptyRow(quantities: MixtureQuantities = {}): MeasurementRow {
  return { quantities, age_days: "", strength: "", strength_unit: "MPa", replicate: "" };
}

export function validateRow(row: MeasurementRow): RowIssue[] {
  const issues: RowIssue[] = [];
  for (const [name, value] of Object.entries(row.quantities)) {
    if (!isFinite(value) || value < 0) {
      issues.push({ field: name, message: "quantity must be a number >= 0" });
    }
  }
  const binder = ["cement", "fly_ash", "slag"]
    .map((b) => row.quantities[b] ?? 0)
    .reduce((a, b) => a + b, 0);
  if (binder <= 0) issues.push({ field: "cement", message: "binder (cement+ash+slag) must be > 0" });
  if ((row.quantities["water"] ?? 0) <= 0) {
    issues.push({ field: "water", message: "water must be > 0" });
  }
  const age = Number(row.age_days);
  if (row.age_days.trim() === "" || !isFinite(age) || age <= 0) {
    issues.push({ field: "age_days", message: "age must be a number > 0 (days)" });
  }
  const strength = Number(row.strength);
  if (row.strength.trim() === "" || !isFinite(strength) || strength < 0) {
    issues.push({ field: "strength", message: "strength must be a number >= 0" });
  }
  if (row.replicate.trim() !== "" && !Number.isInteger(Number(row.replicate))) {
    issues.push({ field: "replicate", message: "replicate must be an integer" });
  }
  return issues;
}

/** API row for POST /measurements; caller must have validated first. */
export function rowPayload(row: MeasurementRow): Record<string, unknown> {
  const payload: Record<string, unknown> = {};
  for (const name of INGREDIENTS) {
    if (row.quantities[name] !== undefined) payload[name] = row.quantities[name];
  }
  payload["age_days"] = Number(row.age_days);
  payload["strength"] = Number(row.strength);
  payload["strength_unit"] = row.strength_unit;
  if (row.replicate.trim() !== "") payload["replicate"] = Number(row.replicate);
  return payload;
}

export interface SubmitPlan {
  payloadRows: Record<string, unknown>[];
  blocked: { index: number; issues: RowIssue[] }[];
}

/** Validate a form's rows; only a fully clean form may be submitted. */
export function planSubmit(rows: MeasurementRow[]): SubmitPlan {
  const blocked: SubmitPlan["blocked"] = [];
  const payloadRows: Record<string, unknown>[] = [];
  rows.forEach((row, index) => {
    const issues = validateRow(row);
    if (issues.length) blocked.push({ index, issues });
    else payloadRows.push(rowPayload(row));
  });
  return { payloadRows, blocked };
}

export interface ReportLine {
  line: string;
  status: "accepted" | "rejected";
  message: string;
}

export function renderReport(result: IngestReportPayload): ReportLine[] {
  const lines: ReportLine[] = [];
  lines.push({
    line: "*",
    status: "accepted",
    message: `${result.report.n_accepted} of ${result.report.n_rows} rows accepted, ` +
      `${result.appended} appended`,
  });
  for (const err of result.report.errors) {
    lines.push({ line: String(err.line), status: "rejected", message: err.message });
  }
  return lines;
}

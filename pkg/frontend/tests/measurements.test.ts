/**
 * [SECONDARY acceptance] The measurement form blocks invalid rows
 * client-side; nothing is sent until every row is clean, and server reports
 * render per row.
 */
import { describe, expect, it } from "vitest";

import {
  emptyRow,
  planSubmit,
  renderReport,
  rowPayload,
  validateRow,
  type MeasurementRow,
} from "../src/measurements.js";
import type { Envelope, IngestReportPayload } from "../src/types.js";

import okFixture from "./fixtures/measurements_response.json";
import partialFixture from "./fixtures/measurements_partial.json";

function goodRow(overrides: Partial<MeasurementRow> = {}): MeasurementRow {
  return {
    quantities: { cement: 320, slag: 60, water: 160, fine_aggregate: 820, coarse_aggregate: 950 },
    age_days: "28",
    strength: "41.2",
    strength_unit: "MPa",
    replicate: "1",
    ...overrides,
  };
}

describe("client-side validation", () => {
  it("accepts a clean row", () => {
    expect(validateRow(goodRow())).toEqual([]);
  });

  it("flags negative strength before any request is built", () => {
    const issues = validateRow(goodRow({ strength: "-3" }));
    expect(issues.some((i) => i.field === "strength")).toBe(true);
  });

  it("flags missing age, zero binder, and non-integer replicate", () => {
    const row = goodRow({
      quantities: { water: 160 },
      age_days: "",
      replicate: "1.5",
    });
    const fields = validateRow(row).map((i) => i.field);
    expect(fields).toContain("age_days");
    expect(fields).toContain("cement");
    expect(fields).toContain("replicate");
  });

  it("planSubmit blocks the whole submit when any row is invalid", () => {
    const plan = planSubmit([goodRow(), goodRow({ strength: "oops" })]);
    expect(plan.blocked).toHaveLength(1);
    expect(plan.blocked[0]!.index).toBe(1);
  });
});

describe("payload building", () => {
  it("carries the unit selector through to the payload", () => {
    const payload = rowPayload(goodRow({ strength: "5979", strength_unit: "psi" }));
    expect(payload["strength_unit"]).toBe("psi");
    expect(payload["strength"]).toBe(5979);
    expect(payload["age_days"]).toBe(28);
    expect(payload["cement"]).toBe(320);
  });

  it("omits blank replicates", () => {
    const payload = rowPayload(goodRow({ replicate: "" }));
    expect("replicate" in payload).toBe(false);
  });
});

describe("server report rendering", () => {
  it("summarizes a fully accepted ingest", () => {
    const body = okFixture as Envelope<IngestReportPayload>;
    if (!body.ok) throw new Error("fixture should be ok");
    const lines = renderReport(body.data);
    expect(lines[0]!.status).toBe("accepted");
    expect(lines[0]!.message).toContain(`${body.data.report.n_accepted} of`);
    expect(lines).toHaveLength(1); // no rejected rows
  });

  it("renders per-row diagnostics from a partial ingest", () => {
    const body = partialFixture as Envelope<IngestReportPayload>;
    if (!body.ok) throw new Error("fixture should be ok");
    const lines = renderReport(body.data);
    const rejected = lines.filter((l) => l.status === "rejected");
    expect(rejected.length).toBe(body.data.report.errors.length);
    expect(rejected[0]!.line).toBe(String(body.data.report.errors[0]!.line));
  });
});

describe("empty row factory", () => {
  it("prefills quantities when given a mixture", () => {
    const row = emptyRow({ cement: 300 });
    expect(row.quantities["cement"]).toBe(300);
    expect(row.age_days).toBe("");
  });
});

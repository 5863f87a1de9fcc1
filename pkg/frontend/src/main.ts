/**
 * Page wiring: campaign picker + state panel, measurement entry grid,
 * frontier explorer with scenario overlays, and batch review. All numbers on
 * screen come from API payloads; this file only routes them to the DOM.
 */

import { ApiRequestError, MixoptClient } from "./api.js";
import { frontierChartSvg } from "./chart.js";
import {
  describeMixture,
  empiricalSeries,
  inferredSeries,
  type FrontierSeries,
} from "./frontier.js";
import {
  emptyRow,
  planSubmit,
  renderReport,
  type MeasurementRow,
} from "./measurements.js";
import { isStale, measurementPrefill, mixSheet, reviewRows } from "./review.js";
import {
  buildScenario,
  debounce,
  scenarioLabel,
  type ScenarioControls,
} from "./scenario.js";
import type { BatchPayload, CampaignState, MixtureQuantities } from "./types.js";
import { INGREDIENTS } from "./types.js";
import { readFromLocation, syncToLocation, type ViewState } from "./urlState.js";

const client = new MixoptClient("");

interface AppState {
  view: ViewState;
  campaign: CampaignState | null;
  rows: MeasurementRow[];
  overlays: { label: string; controls: ScenarioControls }[];
  lastBatch: BatchPayload | null;
  inflight: AbortController | null;
}

const app: AppState = {
  view: readFromLocation(),
  campaign: null,
  rows: [emptyRow()],
  overlays: [],
  lastBatch: null,
  inflight: null,
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function banner(message: string, kind: "error" | "info" = "error"): void {
  const box = el<HTMLDivElement>("banner");
  box.textContent = message;
  box.className = message ? `banner ${kind}` : "banner hidden";
}

// -- state panel -------------------------------------------------------------

async function refreshState(): Promise<void> {
  if (!app.view.campaign) return;
  try {
    app.campaign = await client.state(app.view.campaign);
  } catch (err) {
    banner(err instanceof Error ? err.message : String(err));
    return;
  }
  const s = app.campaign;
  el("state-panel").innerHTML = `
    <h3>${s.id}</h3>
    <dl>
      <dt>observations</dt><dd id="obs-count">${s.observations.measured} measured</dd>
      <dt>batches</dt><dd>${s.batches.map((b) => `${b.batch_id} (${b.origin})`).join(", ") || "none"}</dd>
      <dt>frontier HV</dt><dd>${Object.entries(s.frontier_hypervolumes)
        .map(([k, v]) => `${k.replace("age_", "day ")}: ${v.toFixed(0)}`)
        .join(" | ")}</dd>
      <dt>model snapshot</dt><dd>${s.snapshot_digest?.slice(0, 12) ?? "not fitted"}</dd>
    </dl>`;
  if (s.snapshot_errors.length) banner(s.snapshot_errors[0] ?? "", "error");
}

// -- measurement entry ---------------------------------------------------------

function renderMeasurementForm(): void {
  const table = el<HTMLTableElement>("measurement-rows");
  const header = ["mix"].concat(INGREDIENTS as unknown as string[], [
    "age_days", "strength", "unit", "replicate", "",
  ]);
  const rows = app.rows
    .map((row, i) => {
      const issues = new Map(planSubmit([row]).blocked[0]?.issues.map((x) => [x.field, x.message]) ?? []);
      const cell = (name: string, value: string, type = "number") => {
        const bad = issues.has(name) ? " invalid" : "";
        return `<td><input class="cell${bad}" data-row="${i}" data-field="${name}" ` +
          `type="${type}" step="any" value="${value}" title="${issues.get(name) ?? ""}"></td>`;
      };
      const cells = INGREDIENTS.map((name) =>
        cell(name, String(row.quantities[name] ?? "")),
      ).join("");
      return `<tr><td>${i + 1}</td>${cells}` +
        cell("age_days", row.age_days) +
        cell("strength", row.strength) +
        `<td><select data-row="${i}" data-field="strength_unit">
           <option${row.strength_unit === "MPa" ? " selected" : ""}>MPa</option>
           <option${row.strength_unit === "psi" ? " selected" : ""}>psi</option>
         </select></td>` +
        cell("replicate", row.replicate) +
        `<td><button data-drop="${i}" class="mini">x</button></td></tr>`;
    })
    .join("");
  table.innerHTML =
    `<tr>${header.map((h) => `<th>${h.replace(/_/g, " ")}</th>`).join("")}</tr>` + rows;
}

function bindMeasurementEvents(): void {
  el("measurement-rows").addEventListener("change", (event) => {
    const input = event.target as HTMLInputElement | HTMLSelectElement;
    const rowIdx = Number(input.dataset["row"]);
    const field = input.dataset["field"];
    const row = app.rows[rowIdx];
    if (!row || !field) return;
    if ((INGREDIENTS as readonly string[]).includes(field)) {
      const v = Number(input.value);
      if (input.value === "") delete row.quantities[field];
      else row.quantities[field] = v;
    } else if (field === "strength_unit") {
      row.strength_unit = input.value as "MPa" | "psi";
    } else {
      (row as unknown as Record<string, string>)[field] = input.value;
    }
    renderMeasurementForm();
  });
  el("measurement-rows").addEventListener("click", (event) => {
    const btn = event.target as HTMLElement;
    if (btn.dataset["drop"] !== undefined) {
      app.rows.splice(Number(btn.dataset["drop"]), 1);
      if (!app.rows.length) app.rows.push(emptyRow());
      renderMeasurementForm();
    }
  });
  el("add-row").addEventListener("click", () => {
    app.rows.push(emptyRow());
    renderMeasurementForm();
  });
  el("submit-measurements").addEventListener("click", () => {
    void submitMeasurements();
  });
}

async function submitMeasurements(): Promise<void> {
  if (!app.view.campaign) return;
  const plan = planSubmit(app.rows);
  const reportBox = el("measurement-report");
  if (plan.blocked.length) {
    // invalid cells stay local; nothing is sent
    reportBox.innerHTML = plan.blocked
      .map((b) => `<div class="rejected">row ${b.index + 1}: ` +
        `${b.issues.map((i) => `${i.field}: ${i.message}`).join("; ")}</div>`)
      .join("");
    renderMeasurementForm();
    return;
  }
  const batchId = (el<HTMLInputElement>("batch-label")).value || undefined;
  try {
    const result = await client.postMeasurements(
      app.view.campaign, plan.payloadRows, batchId,
      { idempotencyKey: crypto.randomUUID() },
    );
    reportBox.innerHTML = renderReport(result)
      .map((line) => `<div class="${line.status}">[${line.line}] ${line.message}</div>`)
      .join("");
    app.rows = [emptyRow()];
    renderMeasurementForm();
    await refreshState();
  } catch (err) {
    if (err instanceof ApiRequestError) {
      reportBox.innerHTML = `<div class="rejected">${err.code}: ${err.message}</div>`;
    } else {
      banner(String(err));
    }
  }
}

// -- frontier explorer ---------------------------------------------------------

function currentControls(): ScenarioControls {
  return app.view.controls;
}

async function redrawFrontier(): Promise<void> {
  if (!app.view.campaign) return;
  syncToLocation(app.view);
  const age = app.view.age;
  const series: FrontierSeries[] = [];
  try {
    const empirical = await client.empiricalFrontier(app.view.campaign, age);
    series.push(empiricalSeries(empirical));
  } catch {
    // a fresh campaign has no measurements yet; the inferred view still works
  }
  if (app.campaign?.snapshot_digest) {
    app.inflight?.abort();
    const controller = new AbortController();
    app.inflight = controller;
    const scenarios = [{ label: scenarioLabel(currentControls()), controls: currentControls() }]
      .concat(app.overlays)
      .slice(0, 3); // chart overlays at most 3 scenarios
    try {
      for (const { label, controls } of scenarios) {
        const payload = await client.inferredFrontier(
          app.view.campaign, buildScenario(controls), 0, 8000, { signal: controller.signal },
        );
        series.push(inferredSeries(payload, age, label));
      }
      banner("");
    } catch (err) {
      if (err instanceof ApiRequestError && err.code === "infeasible_scenario") {
        banner(`infeasible scenario: ${err.message} ${JSON.stringify(err.detail ?? "")}`);
      } else if ((err as Error).name !== "AbortError") {
        banner(String(err));
      }
    }
  }
  el("chart").innerHTML = frontierChartSvg(series);
  bindPointClicks(series);
}

function bindPointClicks(series: FrontierSeries[]): void {
  const svg = el("chart").querySelector("svg");
  if (!svg) return;
  const all = series.flatMap((s) => s.points);
  const circles = Array.from(svg.querySelectorAll("circle.frontier, circle.dominated"));
  circles.forEach((node, i) => {
    node.addEventListener("click", () => {
      const p = all[i];
      if (!p) return;
      el("drilldown").textContent =
        `${p.origin} | day ${app.view.age}: ${p.strength.toFixed(1)} MPa` +
        (p.sd ? ` ± ${(1.96 * p.sd).toFixed(1)}` : "") +
        ` | GWP ${p.gwp.toFixed(0)} kgCO2e/m³ | ${describeMixture(p.mixture)}`;
    });
  });
}

const debouncedRedraw = debounce(() => void redrawFrontier(), 300);

function bindScenarioControls(): void {
  el<HTMLInputElement>("toggle-flyash").addEventListener("change", (e) => {
    app.view.controls.excludeFlyAsh = (e.target as HTMLInputElement).checked;
    debouncedRedraw();
  });
  el<HTMLInputElement>("toggle-slag").addEventListener("change", (e) => {
    app.view.controls.excludeSlag = (e.target as HTMLInputElement).checked;
    debouncedRedraw();
  });
  el<HTMLInputElement>("wb-slider").addEventListener("input", (e) => {
    const v = Number((e.target as HTMLInputElement).value);
    app.view.controls.wbWindow = v >= 0.6 ? null : [v, v + 0.05];
    el("wb-label").textContent = app.view.controls.wbWindow
      ? `w/b ${v.toFixed(2)}-${(v + 0.05).toFixed(2)}`
      : "w/b: campaign default";
    debouncedRedraw();
  });
  el<HTMLSelectElement>("age-select").addEventListener("change", (e) => {
    app.view.age = (e.target as HTMLSelectElement).value === "1" ? 1 : 28;
    debouncedRedraw();
  });
  el("overlay-add").addEventListener("click", () => {
    if (app.overlays.length >= 2) app.overlays.shift();
    app.overlays.push({
      label: scenarioLabel(currentControls()),
      controls: { ...currentControls() },
    });
    debouncedRedraw();
  });
  el("overlay-clear").addEventListener("click", () => {
    app.overlays = [];
    debouncedRedraw();
  });
}

// -- batch proposal & review -----------------------------------------------------

async function proposeBatch(): Promise<void> {
  if (!app.view.campaign) return;
  const q = Number(el<HTMLInputElement>("propose-q").value) || 6;
  const seed = Number(el<HTMLInputElement>("propose-seed").value) || 0;
  const status = el("proposal-status");
  try {
    const { job_id } = await client.propose(app.view.campaign, q, seed,
      { idempotencyKey: crypto.randomUUID() });
    status.textContent = `job ${job_id} running...`;
    const batch = await client.pollJob(job_id);
    app.lastBatch = batch;
    status.textContent = `batch ${batch.batch_id} ready`;
    await refreshState();
    renderReview();
  } catch (err) {
    status.textContent = err instanceof Error ? err.message : String(err);
  }
}

function renderReview(): void {
  const box = el("review-panel");
  if (!app.lastBatch) {
    box.innerHTML = "<p>no proposed batch yet</p>";
    return;
  }
  const rows = reviewRows(app.lastBatch);
  const stale = app.campaign ? isStale(app.lastBatch, app.campaign) : false;
  box.innerHTML =
    (stale
      ? `<div class="banner error">stale: new data arrived since this batch was proposed</div>`
      : "") +
    `<table><tr><th>#</th><th>composition</th><th>1-day (MPa)</th><th>28-day (MPa)</th>
      <th>GWP (kgCO2e/m³)</th></tr>` +
    rows
      .map(
        (r) => `<tr><td>${r.index + 1}</td><td>${describeMixture(r.mixture)}</td>` +
          `<td>${r.predicted1d.mean.toFixed(1)} ± ${(1.96 * r.predicted1d.sd).toFixed(1)}</td>` +
          `<td>${r.predicted28d.mean.toFixed(1)} ± ${(1.96 * r.predicted28d.sd).toFixed(1)}</td>` +
          `<td>${r.gwp.toFixed(0)}</td></tr>`,
      )
      .join("") +
    `</table>
     <button id="accept-batch">accept for measurement</button>
     <button id="print-batch">printable mix sheet</button>`;
  el("accept-batch").addEventListener("click", () => {
    if (!app.lastBatch) return;
    app.rows = measurementPrefill(app.lastBatch).map((q: MixtureQuantities) => emptyRow(q));
    el<HTMLInputElement>("batch-label").value = app.lastBatch.batch_id;
    renderMeasurementForm();
  });
  el("print-batch").addEventListener("click", () => {
    if (!app.lastBatch) return;
    const w = window.open("", "_blank");
    if (w) {
      w.document.write(`<pre>${mixSheet(app.lastBatch)}</pre>`);
      w.print();
    }
  });
}

// -- boot ---------------------------------------------------------------------

async function boot(): Promise<void> {
  const picker = el<HTMLSelectElement>("campaign-select");
  const ids = await client.listCampaigns();
  picker.innerHTML = ids.map((id) => `<option value="${id}">${id}</option>`).join("");
  if (!app.view.campaign && ids.length) app.view.campaign = ids[0] ?? null;
  if (app.view.campaign) picker.value = app.view.campaign;
  picker.addEventListener("change", () => {
    app.view.campaign = picker.value;
    void refreshState().then(() => redrawFrontier());
  });
  el<HTMLSelectElement>("age-select").value = String(app.view.age);
  el<HTMLInputElement>("toggle-flyash").checked = app.view.controls.excludeFlyAsh;
  el<HTMLInputElement>("toggle-slag").checked = app.view.controls.excludeSlag;
  el("propose-run").addEventListener("click", () => void proposeBatch());
  bindMeasurementEvents();
  bindScenarioControls();
  renderMeasurementForm();
  renderReview();
  await refreshState();
  await redrawFrontier();
}

if (typeof document !== "undefined" && document.getElementById("campaign-select")) {
  void boot();
}

/**
 * Scenario controls for the what-if frontier explorer, and their mapping to
 * the documented request body of POST /v1/campaigns/{id}/pareto/inferred.
 */

import type { Scenario } from "./types.js";

export interface ScenarioControls {
  excludeFlyAsh: boolean;
  excludeSlag: boolean;
  /** water/binder window; null leaves the campaign default in force */
  wbWindow: [number, number] | null;
  gwpScale: number; // 1 = campaign table as-is
}

export const DEFAULT_CONTROLS: ScenarioControls = {
  excludeFlyAsh: false,
  excludeSlag: false,
  wbWindow: null,
  gwpScale: 1,
};

/** Request-body scenario for the current control state. An all-default
 * control set maps to an empty scenario object, which the server treats as
 * the campaign's own constraints. */
export function buildScenario(controls: ScenarioControls): Scenario {
  const scenario: Scenario = {};
  const exclude: string[] = [];
  if (controls.excludeFlyAsh) exclude.push("fly_ash");
  if (controls.excludeSlag) exclude.push("slag");
  if (exclude.length) scenario.exclude = exclude;
  if (controls.wbWindow) scenario.wb_window = controls.wbWindow;
  if (controls.gwpScale !== 1) scenario.gwp_scale = controls.gwpScale;
  return scenario;
}

export function scenarioLabel(controls: ScenarioControls): string {
  const parts: string[] = [];
  if (controls.excludeFlyAsh) parts.push("no fly ash");
  if (controls.excludeSlag) parts.push("no slag");
  if (controls.wbWindow) {
    const [lo, hi] = controls.wbWindow;
    parts.push(lo === hi ? `w/b ${lo.toFixed(2)}` : `w/b ${lo.toFixed(2)}-${hi.toFixed(2)}`);
  }
  if (controls.gwpScale !== 1) parts.push(`GWP x${controls.gwpScale}`);
  return parts.length ? parts.join(", ") : "default constraints";
}

export function controlsEqual(a: ScenarioControls, b: ScenarioControls): boolean {
  return (
    a.excludeFlyAsh === b.excludeFlyAsh &&
    a.excludeSlag === b.excludeSlag &&
    a.gwpScale === b.gwpScale &&
    JSON.stringify(a.wbWindow) === JSON.stringify(b.wbWindow)
  );
}

/** Trailing-edge debounce used for slider-driven requests. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs = 300,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => fn(...args), waitMs);
  };
}

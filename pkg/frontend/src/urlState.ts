/**
 * Scenario controls and view selection live in the URL query string, so a
 * link reproduces the exact view. Pure functions over query strings; the DOM
 * layer calls syncToLocation/readFromLocation.
 */

import { DEFAULT_CONTROLS, type ScenarioControls } from "./scenario.js";

export interface ViewState {
  campaign: string | null;
  age: 1 | 28;
  controls: ScenarioControls;
}

export const DEFAULT_VIEW: ViewState = {
  campaign: null,
  age: 28,
  controls: DEFAULT_CONTROLS,
};

export function encodeView(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.campaign) params.set("campaign", state.campaign);
  if (state.age !== DEFAULT_VIEW.age) params.set("age", String(state.age));
  const c = state.controls;
  if (c.excludeFlyAsh) params.set("noash", "1");
  if (c.excludeSlag) params.set("noslag", "1");
  if (c.wbWindow) params.set("wb", `${c.wbWindow[0]}-${c.wbWindow[1]}`);
  if (c.gwpScale !== 1) params.set("gwp", String(c.gwpScale));
  return params.toString();
}

export function decodeView(query: string): ViewState {
  const params = new URLSearchParams(query);
  const wbRaw = params.get("wb");
  let wbWindow: [number, number] | null = null;
  if (wbRaw) {
    const [lo, hi] = wbRaw.split("-").map(Number);
    if (lo !== undefined && hi !== undefined && isFinite(lo) && isFinite(hi) && lo <= hi) {
      wbWindow = [lo, hi];
    }
  }
  const age = params.get("age") === "1" ? 1 : 28;
  const gwp = Number(params.get("gwp") ?? "1");
  return {
    campaign: params.get("campaign"),
    age,
    controls: {
      excludeFlyAsh: params.get("noash") === "1",
      excludeSlag: params.get("noslag") === "1",
      wbWindow,
      gwpScale: isFinite(gwp) && gwp > 0 ? gwp : 1,
    },
  };
}

export function readFromLocation(): ViewState {
  return decodeView(window.location.search);
}

export function syncToLocation(state: ViewState): void {
  const query = encodeView(state);
  const url = query ? `${window.location.pathname}?${query}` : window.location.pathname;
  window.history.replaceState(null, "", url);
}

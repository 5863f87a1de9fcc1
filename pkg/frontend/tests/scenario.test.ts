/**
 * [SECONDARY acceptance] Scenario controls map to the documented request
 * bodies of POST /v1/campaigns/{id}/pareto/inferred.
 */
import { describe, expect, it } from "vitest";

import {
  DEFAULT_CONTROLS,
  buildScenario,
  controlsEqual,
  debounce,
  scenarioLabel,
} from "../src/scenario.js";
import { decodeView, encodeView } from "../src/urlState.js";

describe("scenario request bodies", () => {
  it("maps default controls to the empty scenario (campaign constraints)", () => {
    expect(buildScenario(DEFAULT_CONTROLS)).toEqual({});
  });

  it("toggling exclude-fly-ash puts the exclusion in the body", () => {
    const body = buildScenario({ ...DEFAULT_CONTROLS, excludeFlyAsh: true });
    expect(body).toEqual({ exclude: ["fly_ash"] });
  });

  it("both exclusions and a wb window compose", () => {
    const body = buildScenario({
      excludeFlyAsh: true,
      excludeSlag: true,
      wbWindow: [0.35, 0.4],
      gwpScale: 1,
    });
    expect(body).toEqual({ exclude: ["fly_ash", "slag"], wb_window: [0.35, 0.4] });
  });

  it("a non-unit gwp scale is forwarded", () => {
    expect(buildScenario({ ...DEFAULT_CONTROLS, gwpScale: 2 })).toEqual({ gwp_scale: 2 });
  });

  it("labels describe the active controls", () => {
    expect(scenarioLabel(DEFAULT_CONTROLS)).toBe("default constraints");
    expect(
      scenarioLabel({ ...DEFAULT_CONTROLS, excludeSlag: true, wbWindow: [0.35, 0.35] }),
    ).toBe("no slag, w/b 0.35");
  });
});

describe("url state", () => {
  it("round-trips the full view state", () => {
    const view = {
      campaign: "demo",
      age: 1 as const,
      controls: {
        excludeFlyAsh: true,
        excludeSlag: false,
        wbWindow: [0.35, 0.4] as [number, number],
        gwpScale: 2,
      },
    };
    expect(decodeView(encodeView(view))).toEqual(view);
  });

  it("an empty query yields the default view", () => {
    const view = decodeView("");
    expect(view.age).toBe(28);
    expect(controlsEqual(view.controls, DEFAULT_CONTROLS)).toBe(true);
    expect(view.campaign).toBeNull();
  });

  it("ignores malformed wb windows", () => {
    expect(decodeView("wb=oops").controls.wbWindow).toBeNull();
    expect(decodeView("wb=0.5-0.3").controls.wbWindow).toBeNull();
  });
});

describe("debounce", () => {
  it("fires once on the trailing edge", async () => {
    let calls = 0;
    const bump = debounce(() => {
      calls += 1;
    }, 20);
    bump();
    bump();
    bump();
    expect(calls).toBe(0);
    await new Promise((resolve) => setTimeout(resolve, 60));
    expect(calls).toBe(1);
  });
});

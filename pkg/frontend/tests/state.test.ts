import { describe, expect, it } from "vitest";

import { ViewState } from "../src/state.js";

const VIEWPORT = { x0: 0, y0: 0, x1: 1060, y1: 530 };

describe("ViewState", () => {
  it("starts with every class visible and nothing selected", () => {
    const state = new ViewState(VIEWPORT);
    expect(state.alpha).toBe(0.9);
    expect(state.selectedGridId).toBeNull();
    for (const cls of ["largely_unsuitable", "low", "medium", "high"] as const) {
      expect(state.isVisible(cls)).toBe(true);
    }
  });

  it("accepts alphas only inside [0,1]", () => {
    const state = new ViewState(VIEWPORT);
    state.setAlpha(0);
    state.setAlpha(1);
    state.setAlpha(0.37);
    expect(state.alpha).toBe(0.37);
    expect(() => state.setAlpha(1.01)).toThrow(RangeError);
    expect(() => state.setAlpha(-0.01)).toThrow(RangeError);
    expect(() => new ViewState(VIEWPORT, 2)).toThrow(RangeError);
    expect(state.alpha).toBe(0.37); // rejected sets leave state untouched
  });

  it("only selects ids present in the layer", () => {
    const state = new ViewState(VIEWPORT);
    const layer = new Set([0, 1, 22]);
    state.select(22, layer);
    expect(state.selectedGridId).toBe(22);
    expect(() => state.select(99, layer)).toThrow(/not in the current layer/);
    state.select(null, layer);
    expect(state.selectedGridId).toBeNull();
  });

  it("toggles class visibility both ways", () => {
    const state = new ViewState(VIEWPORT);
    expect(state.toggleClass("high")).toBe(false);
    expect(state.isVisible("high")).toBe(false);
    expect(state.toggleClass("high")).toBe(true);
    expect(state.isVisible("high")).toBe(true);
  });
});

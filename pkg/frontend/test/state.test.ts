import { describe, expect, it } from "vitest";

import { defaultState, parseViewState, serializeViewState } from "../src/state";
import type { ViewState } from "../src/types";

function roundTrip(state: ViewState): ViewState {
  return parseViewState(serializeViewState(state));
}

describe("view state <-> URL query string", () => {
  it("default state serializes to an empty query", () => {
    expect(serializeViewState(defaultState())).toBe("");
  });

  it("round-trips a fully specified view", () => {
    const state: ViewState = {
      plotId: "w5-d12",
      colorField: "group",
      visibleGroups: new Set(["pass"]),
    };
    const back = roundTrip(state);
    expect(back.plotId).toBe("w5-d12");
    expect(back.colorField).toBe("group");
    expect(Array.from(back.visibleGroups)).toEqual(["pass"]);
  });

  it("round-trips group subsets in canonical order", () => {
    const state = defaultState();
    state.visibleGroups = new Set(["fail", "pass"]);
    const qs = serializeViewState(state);
    expect(qs).toContain("groups=fail%2Cpass");
    expect(Array.from(roundTrip(state).visibleGroups).sort()).toEqual(["fail", "pass"]);
  });

  it("ignores unknown fields and invalid values", () => {
    const state = parseViewState("?color=rainbow&groups=bogus&junk=1");
    expect(state.colorField).toBe("lesson");
    expect(state.visibleGroups.size).toBe(3);
    expect(state.plotId).toBeNull();
  });

  it("accepts queries with or without the leading question mark", () => {
    expect(parseViewState("plot=w1-d2").plotId).toBe("w1-d2");
    expect(parseViewState("?plot=w1-d2").plotId).toBe("w1-d2");
  });
});

import { COLOR_FIELDS, GROUPS, type ColorField, type ViewState } from "./types";

export function defaultState(): ViewState {
  return {
    plotId: null,
    colorField: "lesson",
    visibleGroups: new Set(GROUPS),
  };
}

/** Parse a query string (with or without the leading "?") into a ViewState. */
export function parseViewState(query: string): ViewState {
  const params = new URLSearchParams(query.startsWith("?") ? query.slice(1) : query);
  const state = defaultState();
  const plot = params.get("plot");
  if (plot) {
    state.plotId = plot;
  }
  const color = params.get("color");
  if (color && (COLOR_FIELDS as readonly string[]).includes(color)) {
    state.colorField = color as ColorField;
  }
  const groups = params.get("groups");
  if (groups !== null) {
    const chosen = groups
      .split(",")
      .filter((g) => (GROUPS as readonly string[]).includes(g));
    if (chosen.length > 0) {
      state.visibleGroups = new Set(chosen);
    }
  }
  return state;
}

/** Serialize so any view is shareable by link; parse(serialize(s)) === s. */
export function serializeViewState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.plotId) {
    params.set("plot", state.plotId);
  }
  if (state.colorField !== "lesson") {
    params.set("color", state.colorField);
  }
  if (state.visibleGroups.size !== GROUPS.length) {
    params.set("groups", Array.from(state.visibleGroups).sort().join(","));
  }
  return params.toString();
}

export function pushStateToUrl(state: ViewState): void {
  const query = serializeViewState(state);
  const url = query ? `?${query}` : window.location.pathname;
  window.history.replaceState(null, "", url);
}

import { fetchManifest, fetchPoints } from "./api";
import { renderGallery, updateCellRating } from "./gallery";
import { renderRatingWidget } from "./rating";
import { renderScatter } from "./scatter";
import { parseViewState, pushStateToUrl } from "./state";
import { COLOR_FIELDS, type ColorField, type Manifest, type PointRecord, type ViewState } from "./types";

function errorBanner(target: HTMLElement, message: string): void {
  target.innerHTML = "";
  const banner = document.createElement("div");
  banner.className = "error-banner";
  banner.textContent = message;
  target.appendChild(banner);
}

function renderControls(
  target: HTMLElement,
  points: PointRecord[],
  state: ViewState,
  onChange: () => void,
): void {
  target.innerHTML = "";

  const colorLabel = document.createElement("label");
  colorLabel.textContent = "color by ";
  const selectEl = document.createElement("select");
  selectEl.className = "color-field";
  for (const field of COLOR_FIELDS) {
    const opt = document.createElement("option");
    opt.value = field;
    opt.textContent = field;
    opt.selected = field === state.colorField;
    selectEl.appendChild(opt);
  }
  selectEl.addEventListener("change", () => {
    state.colorField = selectEl.value as ColorField;
    onChange();
  });
  colorLabel.appendChild(selectEl);
  target.appendChild(colorLabel);

  const present = Array.from(new Set(points.map((p) => p.group))).sort();
  for (const group of present) {
    const label = document.createElement("label");
    label.className = "group-toggle";
    const box = document.createElement("input");
    box.type = "checkbox";
    box.value = group;
    box.checked = state.visibleGroups.has(group);
    box.addEventListener("change", () => {
      if (box.checked) {
        state.visibleGroups.add(group);
      } else {
        state.visibleGroups.delete(group);
      }
      onChange();
    });
    label.appendChild(box);
    label.appendChild(document.createTextNode(group));
    target.appendChild(label);
  }
}

export async function boot(root: HTMLElement): Promise<void> {
  root.innerHTML = `
    <header class="app-header"><h1>pathlens gallery</h1></header>
    <section id="gallery" class="gallery-pane"></section>
    <section id="detail" class="detail-pane">
      <div id="controls" class="controls"></div>
      <div id="plot"></div>
      <div id="rating"></div>
    </section>
  `;
  const galleryPane = root.querySelector<HTMLElement>("#gallery")!;
  const controlsPane = root.querySelector<HTMLElement>("#controls")!;
  const plotPane = root.querySelector<HTMLElement>("#plot")!;
  const ratingPane = root.querySelector<HTMLElement>("#rating")!;

  const state = parseViewState(window.location.search);

  let manifest: Manifest;
  try {
    manifest = await fetchManifest();
  } catch (err) {
    errorBanner(root, `Could not load the gallery manifest: ${String(err)}`);
    return;
  }

  const openPlot = async (plotId: string) => {
    state.plotId = plotId;
    pushStateToUrl(state);
    let points: PointRecord[];
    try {
      points = (await fetchPoints(plotId)).points;
    } catch (err) {
      errorBanner(plotPane, `Could not load points for ${plotId}: ${String(err)}`);
      return;
    }
    const redraw = () => {
      pushStateToUrl(state);
      renderScatter(plotPane, points, state);
    };
    renderControls(controlsPane, points, state, redraw);
    redraw();
    const entry = manifest.entries.find((e) => e.plot_id === plotId);
    renderRatingWidget(ratingPane, plotId, entry?.rating ?? null, {
      onSaved: (value) => updateCellRating(galleryPane, plotId, value),
    });
  };

  await renderGallery(galleryPane, manifest, { onSelect: (id) => void openPlot(id) });
  if (state.plotId && manifest.entries.some((e) => e.plot_id === state.plotId)) {
    await openPlot(state.plotId);
  }
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) {
    void boot(root);
  }
}

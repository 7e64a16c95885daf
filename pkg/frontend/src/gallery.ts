import { fetchPoints } from "./api";
import { makePalette } from "./palette";
import type { GalleryEntry, Manifest, PointRecord } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";
const THUMB_SIZE = 72;

export interface GalleryHandlers {
  onSelect: (plotId: string) => void;
  /** test seam; defaults to the live API */
  loadPoints?: (plotId: string) => Promise<{ points: PointRecord[] }>;
}

function axisValues(manifest: Manifest, key: "window" | "vector_size"): number[] {
  const fromGrid = key === "window" ? manifest.grid?.windows : manifest.grid?.vector_sizes;
  if (fromGrid && fromGrid.length > 0) {
    return fromGrid;
  }
  return Array.from(new Set(manifest.entries.map((e) => e[key]))).sort((a, b) => a - b);
}

function drawThumbnail(svg: SVGSVGElement, points: PointRecord[]): void {
  if (points.length === 0) {
    return;
  }
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMin = Math.min(...ys);
  const yMax = Math.max(...ys);
  const sx = (v: number) => 3 + ((v - xMin) / (xMax - xMin || 1)) * (THUMB_SIZE - 6);
  const sy = (v: number) => THUMB_SIZE - 3 - ((v - yMin) / (yMax - yMin || 1)) * (THUMB_SIZE - 6);
  const palette = makePalette(points.map((p) => p.lesson));
  for (const p of points) {
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(sx(p.x)));
    dot.setAttribute("cy", String(sy(p.y)));
    dot.setAttribute("r", "1.5");
    dot.setAttribute("fill", palette.get(p.lesson) ?? "#888");
    // overplotted thumbnails stay readable at reduced opacity
    dot.setAttribute("opacity", "0.5");
    svg.appendChild(dot);
  }
}

function buildCell(entry: GalleryEntry, handlers: GalleryHandlers): HTMLElement {
  const cell = document.createElement("button");
  cell.type = "button";
  cell.className = "gallery-cell";
  cell.dataset.plotId = entry.plot_id;
  cell.dataset.window = String(entry.window);
  cell.dataset.vectorSize = String(entry.vector_size);

  const label = document.createElement("div");
  label.className = "cell-label";
  label.textContent = `w${entry.window} · d${entry.vector_size}`;
  cell.appendChild(label);

  const badge = document.createElement("span");
  badge.className = "rating-badge";
  badge.dataset.rating = entry.rating === null ? "" : String(entry.rating);
  badge.textContent = entry.rating === null ? "unrated" : `★${entry.rating}`;
  cell.appendChild(badge);

  if (entry.error !== null) {
    const err = document.createElement("div");
    err.className = "cell-error";
    err.textContent = entry.error;
    cell.appendChild(err);
    cell.disabled = true;
  } else {
    const thumb = document.createElementNS(SVG_NS, "svg");
    thumb.setAttribute("class", "cell-thumb");
    thumb.setAttribute("viewBox", `0 0 ${THUMB_SIZE} ${THUMB_SIZE}`);
    cell.appendChild(thumb);
    cell.addEventListener("click", () => handlers.onSelect(entry.plot_id));
  }
  return cell;
}

/**
 * Render one thumbnail cell per manifest entry, arranged window-by-row and
 * vector-size-by-column. Resolves once every thumbnail fetch has settled.
 */
export async function renderGallery(
  container: HTMLElement,
  manifest: Manifest,
  handlers: GalleryHandlers,
): Promise<void> {
  container.innerHTML = "";
  if (manifest.entries.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "This gallery has no plots yet. Run a sweep first.";
    container.appendChild(empty);
    return;
  }

  const windows = axisValues(manifest, "window");
  const sizes = axisValues(manifest, "vector_size");
  const byCell = new Map(manifest.entries.map((e) => [`${e.window}|${e.vector_size}`, e]));

  const grid = document.createElement("div");
  grid.className = "gallery-grid";
  grid.style.gridTemplateColumns = `repeat(${sizes.length}, minmax(90px, 1fr))`;
  container.appendChild(grid);

  const loads: Promise<void>[] = [];
  const loader = handlers.loadPoints ?? fetchPoints;
  for (const w of windows) {
    for (const d of sizes) {
      const entry = byCell.get(`${w}|${d}`);
      if (!entry) {
        const gap = document.createElement("div");
        gap.className = "gallery-cell cell-missing";
        grid.appendChild(gap);
        continue;
      }
      const cell = buildCell(entry, handlers);
      grid.appendChild(cell);
      const thumb = cell.querySelector<SVGSVGElement>("svg.cell-thumb");
      if (thumb) {
        loads.push(
          loader(entry.plot_id)
            .then((doc) => drawThumbnail(thumb, doc.points))
            .catch(() => {
              thumb.remove();
            }),
        );
      }
    }
  }
  await Promise.allSettled(loads);
}

/** Refresh one cell's badge after a successful rating, no reload needed. */
export function updateCellRating(container: HTMLElement, plotId: string, rating: number): void {
  const cell = container.querySelector<HTMLElement>(
    `.gallery-cell[data-plot-id="${plotId}"]`,
  );
  const badge = cell?.querySelector<HTMLElement>(".rating-badge");
  if (badge) {
    badge.dataset.rating = String(rating);
    badge.textContent = `★${rating}`;
  }
}

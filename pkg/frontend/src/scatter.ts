import { select } from "d3-selection";
import { scaleLinear } from "d3-scale";
import { zoom } from "d3-zoom";

import { makePalette } from "./palette";
import type { PointRecord, ViewState } from "./types";

const WIDTH = 640;
const HEIGHT = 520;
const MARGIN = 24;

/**
 * Full interactive scatterplot for one plot's points.
 *
 * Rendered positions are a pure affine mapping of the served (x, y); the
 * viewer never recomputes coordinates. The legend lists every category of
 * the active color field present in the loaded points exactly once, and the
 * hidden-group filter only controls mark visibility, never the scales.
 */
export function renderScatter(
  container: HTMLElement,
  points: PointRecord[],
  state: ViewState,
): void {
  container.innerHTML = "";
  container.classList.add("scatter-container");

  const palette = makePalette(points.map((p) => String(p[state.colorField])));

  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const x = scaleLinear()
    .domain([Math.min(...xs), Math.max(...xs)])
    .range([MARGIN, WIDTH - MARGIN]);
  const y = scaleLinear()
    .domain([Math.min(...ys), Math.max(...ys)])
    .range([HEIGHT - MARGIN, MARGIN]);

  const svg = select(container)
    .append("svg")
    .attr("class", "scatter-svg")
    .attr("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);

  const plotArea = svg.append("g").attr("class", "plot-area");

  const tooltip = select(container)
    .append("div")
    .attr("class", "tooltip")
    .style("display", "none");

  const visible = points.filter((p) => state.visibleGroups.has(p.group));
  plotArea
    .selectAll("circle")
    .data(visible)
    .join("circle")
    .attr("class", "pt")
    .attr("data-token", (d) => d.token)
    .attr("data-group", (d) => d.group)
    .attr("cx", (d) => x(d.x))
    .attr("cy", (d) => y(d.y))
    .attr("r", 4)
    .attr("fill", (d) => palette.get(String(d[state.colorField])) ?? "#888")
    .attr("opacity", 0.85)
    .on("mouseover", function (event: MouseEvent, d: PointRecord) {
      tooltip
        .style("display", "block")
        .style("left", `${event.offsetX + 12}px`)
        .style("top", `${event.offsetY + 12}px`)
        .html(
          `<strong class="tt-token"></strong>` +
            `<div class="tt-title"></div>` +
            `<div class="tt-meta"></div>`,
        );
      tooltip.select(".tt-token").text(d.token);
      tooltip.select(".tt-title").text(d.title || "(untitled)");
      tooltip.select(".tt-meta").text(`${d.lesson} · ${d.kind} · ${d.group}`);
    })
    .on("mouseout", () => {
      tooltip.style("display", "none");
    });

  const zoomBehavior = zoom<SVGSVGElement, unknown>()
    .scaleExtent([0.5, 40])
    .on("zoom", (event) => {
      plotArea.attr("transform", String(event.transform));
    });
  (svg as any).call(zoomBehavior);

  const legend = document.createElement("ul");
  legend.className = "legend";
  for (const [category, color] of palette) {
    const item = document.createElement("li");
    item.className = "legend-entry";
    item.dataset.category = category;
    const swatch = document.createElement("span");
    swatch.className = "legend-swatch";
    swatch.style.backgroundColor = color;
    item.appendChild(swatch);
    item.appendChild(document.createTextNode(category));
    legend.appendChild(item);
  }
  container.appendChild(legend);
}

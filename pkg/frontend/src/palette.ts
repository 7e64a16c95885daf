// 20 distinguishable categorical colors (the tab20 ramp). Courses span well
// over a hundred lessons, so the palette cycles; reuse is acceptable but the
// assignment must be stable, so categories are keyed by sorted order.
const COLORS = [
  "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c",
  "#98df8a", "#d62728", "#ff9896", "#9467bd", "#c5b0d5",
  "#8c564b", "#c49c94", "#e377c2", "#f7b6d2", "#7f7f7f",
  "#c7c7c7", "#bcbd22", "#dbdb8d", "#17becf", "#9edae5",
];

export function makePalette(values: Iterable<string>): Map<string, string> {
  const categories = Array.from(new Set(values)).sort();
  const palette = new Map<string, string>();
  categories.forEach((cat, i) => {
    palette.set(cat, COLORS[i % COLORS.length]);
  });
  return palette;
}

export const PALETTE_SIZE = COLORS.length;

export interface GalleryEntry {
  plot_id: string;
  window: number;
  vector_size: number;
  rating: number | null;
  note: string;
  files: Record<string, string>;
  error: string | null;
  scope?: string;
}

export interface Manifest {
  format: string;
  corpus_fingerprint: string;
  scope?: string;
  grid?: { windows: number[]; vector_sizes: number[] };
  entries: GalleryEntry[];
}

export interface PointRecord {
  token: string;
  x: number;
  y: number;
  lesson: string;
  kind: string;
  group: string;
  count: number;
  title: string;
}

export interface PointsDoc {
  format: string;
  points: PointRecord[];
}

export const COLOR_FIELDS = ["lesson", "kind", "group"] as const;
export type ColorField = (typeof COLOR_FIELDS)[number];

export const GROUPS = ["pass", "fail", "all"] as const;

export interface ViewState {
  plotId: string | null;
  colorField: ColorField;
  visibleGroups: Set<string>;
}

import { vi } from "vitest";

import type { GalleryEntry, Manifest, PointRecord, PointsDoc } from "../src/types";

export function makeEntry(w: number, d: number, over: Partial<GalleryEntry> = {}): GalleryEntry {
  return {
    plot_id: `w${w}-d${d}`,
    window: w,
    vector_size: d,
    rating: null,
    note: "",
    files: { points: `w${w}-d${d}.points.json` },
    error: null,
    scope: "joint",
    ...over,
  };
}

export function makeManifest(windows: number[], sizes: number[]): Manifest {
  const entries: GalleryEntry[] = [];
  for (const w of windows) {
    for (const d of sizes) {
      entries.push(makeEntry(w, d));
    }
  }
  return {
    format: "pathlens-gallery/1",
    corpus_fingerprint: "f00d",
    scope: "joint",
    grid: { windows, vector_sizes: sizes },
    entries,
  };
}

export function makePoint(over: Partial<PointRecord> = {}): PointRecord {
  return {
    token: "s:1",
    x: 0,
    y: 0,
    lesson: "L1",
    kind: "training",
    group: "all",
    count: 1,
    title: "L1 training 1",
    ...over,
  };
}

export function jointPoints(): PointRecord[] {
  return [
    makePoint({ token: "p-s:12", x: 1, y: 2, lesson: "R*", kind: "application",
                group: "pass", title: "Star quiz" }),
    makePoint({ token: "p-s:13", x: 2, y: 3, lesson: "R*", kind: "training",
                group: "pass", title: "Star practice" }),
    makePoint({ token: "n-s:12", x: -1, y: -2, lesson: "R*", kind: "application",
                group: "fail", title: "Star quiz" }),
    makePoint({ token: "n-s:40", x: -2, y: -1, lesson: "f_p", kind: "training",
                group: "fail", title: "Planet practice" }),
  ];
}

/** In-memory gallery backend behind a stubbed global fetch. */
export function stubBackend(manifest: Manifest, pointsByPlot: Record<string, PointRecord[]>) {
  const store = { manifest: structuredClone(manifest) };

  const handler = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = typeof input === "string" ? input : input.toString();
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    if (path === "/api/manifest") {
      return new Response(JSON.stringify(store.manifest), { status: 200 });
    }
    if (path.startsWith("/api/plots/")) {
      const plotId = decodeURIComponent(path.slice("/api/plots/".length));
      const points = pointsByPlot[plotId];
      if (!points) {
        return new Response(JSON.stringify({ error: "unknown plot" }), { status: 404 });
      }
      const doc: PointsDoc = { format: "pathlens-points/1", points };
      return new Response(JSON.stringify(doc), { status: 200 });
    }
    if (path === "/api/ratings" && init?.method === "POST") {
      const body = JSON.parse(String(init.body));
      const entry = store.manifest.entries.find((e) => e.plot_id === body.plot_id);
      if (!entry) {
        return new Response(JSON.stringify({ error: "unknown plot" }), { status: 404 });
      }
      if (!Number.isInteger(body.rating) || body.rating < 1 || body.rating > 5) {
        return new Response(JSON.stringify({ error: "rating must be 1..5" }), { status: 422 });
      }
      entry.rating = body.rating;
      return new Response(JSON.stringify({ ok: true, entry }), { status: 200 });
    }
    return new Response("not found", { status: 404 });
  };

  vi.stubGlobal("fetch", vi.fn(handler));
  return store;
}

export function hover(el: Element): void {
  el.dispatchEvent(new MouseEvent("mouseover", { bubbles: true }));
}

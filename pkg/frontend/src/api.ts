import type { Manifest, PointsDoc } from "./types";

export async function fetchManifest(): Promise<Manifest> {
  const res = await fetch("/api/manifest");
  if (!res.ok) {
    throw new Error(`manifest fetch failed with status ${res.status}`);
  }
  return (await res.json()) as Manifest;
}

export async function fetchPoints(plotId: string): Promise<PointsDoc> {
  const res = await fetch(`/api/plots/${encodeURIComponent(plotId)}`);
  if (!res.ok) {
    throw new Error(`points fetch for ${plotId} failed with status ${res.status}`);
  }
  return (await res.json()) as PointsDoc;
}

export interface RatingResult {
  ok: boolean;
  status: number;
  message?: string;
}

/** POST a rating; resolves with the server verdict, rejects only on network failure. */
export async function postRating(
  plotId: string,
  rating: number,
  note?: string,
): Promise<RatingResult> {
  const body: Record<string, unknown> = { plot_id: plotId, rating };
  if (note !== undefined) {
    body.note = note;
  }
  const res = await fetch("/api/ratings", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  if (res.ok) {
    return { ok: true, status: res.status };
  }
  let message = `rating rejected with status ${res.status}`;
  try {
    const doc = (await res.json()) as { error?: string };
    if (doc.error) {
      message = doc.error;
    }
  } catch {
    // non-JSON error body, keep the generic message
  }
  return { ok: false, status: res.status, message };
}

"""Hyperparameter sweep over (window, vector_size) cells and the rated gallery.

Each grid cell trains its own embedding model and 2D projection, exports plot
points with categorical metadata for coloring and tooltips, and renders a PNG.
The gallery directory holds one manifest (gallery.json) describing every cell,
a delimited summary (gallery.csv), an overview thumbnail figure (gallery.png),
and the per-cell artifact files. Expert ratings (1..5) are recorded back into
the manifest, which is the durable research artifact of the tuning session.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import plots
from .corpus import (
    ScreenMetadata,
    Sequence,
    TokenVocab,
    corpus_fingerprint,
    split_outcome_prefix,
)
from .errors import FingerprintMismatch, PathlensError, RatingOutOfRange, UnknownPlot
from .skipgram import SkipGramConfig, save_model, train
from .tsne import TsneConfig, run_tsne, save_projection

GALLERY_FORMAT = "pathlens-gallery/1"
POINTS_FORMAT = "pathlens-points/1"
MANIFEST_NAME = "gallery.json"
SUMMARY_NAME = "gallery.csv"
OVERVIEW_NAME = "gallery.png"

SCOPES = ("joint", "per_group")


@dataclass(frozen=True)
class SweepGrid:
    windows: tuple
    vector_sizes: tuple

    def __post_init__(self):
        for name, values in (("windows", self.windows), ("vector_sizes", self.vector_sizes)):
            if not values:
                raise ValueError(f"{name} must be non-empty")
            if len(set(values)) != len(values):
                raise ValueError(f"{name} must not contain duplicates")
            if any(v < 1 for v in values):
                raise ValueError(f"{name} must be positive integers")

    def cells(self) -> List[tuple]:
        return [(w, d) for w in self.windows for d in self.vector_sizes]


def plot_id_for(window: int, vector_size: int) -> str:
    return f"w{window}-d{vector_size}"


def derive_cell_seed(base_seed: int, plot_id: str) -> int:
    """base_seed XOR a stable 64-bit hash of the plot id.

    Python's builtin hash() is salted per process, so the hash comes from
    sha256; cells stay reproducible across runs and execution order.
    """
    digest = hashlib.sha256(plot_id.encode("utf-8")).digest()
    h = int.from_bytes(digest[:8], "big")
    return (base_seed ^ h) & (2**63 - 1)


def export_points(
    tokens: List[str],
    xy: np.ndarray,
    metadata: Optional[ScreenMetadata],
    vocab: TokenVocab,
) -> List[dict]:
    """One plot-point record per projected token.

    Outcome prefixes map to the pass/fail group and are stripped before the
    metadata lookup; forum:* tokens are kind forum; anything without a
    metadata row falls back to lesson "unknown", kind unknown.
    """
    records = []
    for i, token in enumerate(tokens):
        group, bare = split_outcome_prefix(token)
        info = metadata.get(bare) if metadata else None
        if bare.startswith("forum:"):
            kind = "forum"
            lesson = info.lesson if info else "unknown"
            title = info.title if info else ""
        elif info is not None:
            lesson, kind, title = info.lesson, info.kind, info.title
        else:
            lesson, kind, title = "unknown", "unknown", ""
        records.append(
            {
                "token": token,
                "x": float(xy[i, 0]),
                "y": float(xy[i, 1]),
                "lesson": lesson,
                "kind": kind,
                "group": group,
                "count": int(vocab.counts.get(token, 0)),
                "title": title,
            }
        )
    return records


def _dump_json(path: Path, doc: dict) -> None:
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def save_points(path: Path, points: List[dict]) -> None:
    _dump_json(path, {"format": POINTS_FORMAT, "points": points})


def load_points(path: Path) -> List[dict]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != POINTS_FORMAT:
        raise ValueError(f"unsupported points format: {doc.get('format')!r}")
    return doc["points"]


def _run_cell(args: dict) -> dict:
    """Train + project + export one grid cell; returns the manifest entry dict.

    Runs in a worker process under parallel sweeps, so everything it needs
    arrives in one picklable dict and all randomness comes from the cell seed.
    """
    window: int = args["window"]
    dim: int = args["vector_size"]
    plot_id = plot_id_for(window, dim)
    out_dir = Path(args["out_dir"])
    entry = {
        "plot_id": plot_id,
        "window": window,
        "vector_size": dim,
        "scope": args["scope"],
        "rating": None,
        "note": "",
        "files": {},
        "error": None,
    }
    try:
        seed = derive_cell_seed(args["base"].seed, plot_id)
        config = replace(args["base"], vector_size=dim, window=window, seed=seed)
        tsne_config = replace(args["tsne"], seed=seed)
        sequences: List[Sequence] = args["sequences"]
        vocab: TokenVocab = args["vocab"]
        metadata = args["metadata"]

        model, _ = train(sequences, vocab, config)
        model_file = f"{plot_id}.model.json"
        save_model(model, out_dir / model_file)
        entry["files"]["model"] = model_file

        if args["scope"] == "joint":
            proj = run_tsne(model.W, tsne_config)
            proj_file = f"{plot_id}.proj.json"
            save_projection(out_dir / proj_file, vocab.tokens, proj)
            entry["files"]["projection"] = proj_file
            points = export_points(vocab.tokens, proj.points, metadata, vocab)
        else:
            points = []
            for group, prefix in (("pass", "p-"), ("fail", "n-")):
                part = [i for i, t in enumerate(vocab.tokens) if t.startswith(prefix)]
                if len(part) < 4:
                    raise PathlensError(
                        f"{group} partition has {len(part)} tokens; need at least 4 to project"
                    )
                part_tokens = [vocab.tokens[i] for i in part]
                proj = run_tsne(model.W[part], tsne_config)
                proj_file = f"{plot_id}.proj-{group}.json"
                save_projection(out_dir / proj_file, part_tokens, proj)
                entry["files"][f"projection_{group}"] = proj_file
                group_points = export_points(part_tokens, proj.points, metadata, vocab)
                points_file = f"{plot_id}.points-{group}.json"
                save_points(out_dir / points_file, group_points)
                entry["files"][f"points_{group}"] = points_file
                points.extend(group_points)

        points_file = f"{plot_id}.points.json"
        save_points(out_dir / points_file, points)
        entry["files"]["points"] = points_file

        plot_file = f"{plot_id}.png"
        plots.render_points_figure(
            points,
            out_dir / plot_file,
            title=f"window {window}, vector size {dim}",
            split_by_group=args["scope"] == "per_group",
        )
        entry["files"]["plot"] = plot_file
    except (PathlensError, ValueError, FloatingPointError) as exc:
        entry["error"] = str(exc)
    return entry


def run_sweep(
    sequences: List[Sequence],
    vocab: TokenVocab,
    grid: SweepGrid,
    base: SkipGramConfig,
    tsne: TsneConfig,
    scope: str,
    out_dir: Path,
    metadata: Optional[ScreenMetadata] = None,
    jobs: int = 1,
) -> dict:
    """Run every grid cell and write the gallery directory; returns the manifest.

    Cells are seeded independently (base seed XOR plot-id hash) so parallel
    and serial execution write identical files. Failed cells are recorded
    with an error note instead of aborting the sweep. Re-running over an
    existing gallery resumes: healthy cells (and their ratings) are kept and
    only failed or missing cells are recomputed, provided the corpus
    fingerprint matches.
    """
    if scope not in SCOPES:
        raise ValueError(f"scope must be one of {SCOPES}, got {scope!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fingerprint = corpus_fingerprint(sequences)

    kept: Dict[str, dict] = {}
    manifest_path = out_dir / MANIFEST_NAME
    if manifest_path.exists():
        previous = load_manifest(out_dir)
        if previous["corpus_fingerprint"] != fingerprint:
            raise FingerprintMismatch(previous["corpus_fingerprint"], fingerprint)
        for entry in previous["entries"]:
            files_ok = all((out_dir / f).exists() for f in entry["files"].values())
            if entry["error"] is None and entry["scope"] == scope and files_ok:
                kept[entry["plot_id"]] = entry

    todo = [
        {
            "window": w,
            "vector_size": d,
            "scope": scope,
            "out_dir": str(out_dir),
            "sequences": sequences,
            "vocab": vocab,
            "metadata": metadata,
            "base": base,
            "tsne": tsne,
        }
        for (w, d) in grid.cells()
        if plot_id_for(w, d) not in kept
    ]

    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            computed = list(pool.map(_run_cell, todo))
    else:
        computed = [_run_cell(args) for args in todo]
    by_id = {e["plot_id"]: e for e in computed}
    by_id.update(kept)

    entries = [by_id[plot_id_for(w, d)] for (w, d) in grid.cells()]
    manifest = {
        "format": GALLERY_FORMAT,
        "corpus_fingerprint": fingerprint,
        "created_by": "pathlens/0.1.0",
        "scope": scope,
        "grid": {"windows": list(grid.windows), "vector_sizes": list(grid.vector_sizes)},
        "entries": entries,
    }
    save_manifest(out_dir, manifest)
    _write_summary(out_dir, manifest)
    _render_overview(out_dir, manifest)
    return manifest


def _write_summary(out_dir: Path, manifest: dict) -> None:
    """Delimited companion to the manifest for spreadsheet triage."""
    with open(out_dir / SUMMARY_NAME, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["plot_id", "window", "vector_size", "rating", "note", "error"])
        for e in manifest["entries"]:
            writer.writerow(
                [e["plot_id"], e["window"], e["vector_size"],
                 e["rating"] if e["rating"] is not None else "",
                 e["note"], e["error"] or ""]
            )


def _render_overview(out_dir: Path, manifest: dict) -> None:
    cells = []
    for e in manifest["entries"]:
        points = None
        if e["error"] is None and "points" in e["files"]:
            points_path = out_dir / e["files"]["points"]
            if points_path.exists():
                points = load_points(points_path)
        cells.append(
            {
                "label": e["plot_id"],
                "points": points,
                "rating": e["rating"],
                "error": e["error"],
            }
        )
    n_rows = len(manifest["grid"]["windows"])
    n_cols = len(manifest["grid"]["vector_sizes"])
    plots.render_gallery_figure(cells, n_rows, n_cols, out_dir / OVERVIEW_NAME)


def load_manifest(gallery_dir: Path) -> dict:
    path = Path(gallery_dir) / MANIFEST_NAME
    manifest = json.loads(path.read_text(encoding="utf-8"))
    if manifest.get("format") != GALLERY_FORMAT:
        raise ValueError(f"unsupported gallery format: {manifest.get('format')!r}")
    return manifest


def save_manifest(gallery_dir: Path, manifest: dict) -> None:
    _dump_json(Path(gallery_dir) / MANIFEST_NAME, manifest)


def record_rating(gallery_dir: Path, plot_id: str, rating: int, note: Optional[str] = None) -> dict:
    """Store an expert rating (1..5) for one plot; re-rating overwrites.

    The manifest rewrite is atomic (write-temp-then-rename) and the CSV
    summary is refreshed to match.
    """
    if isinstance(rating, bool) or not isinstance(rating, int) or not (1 <= rating <= 5):
        raise RatingOutOfRange(rating)
    gallery_dir = Path(gallery_dir)
    manifest = load_manifest(gallery_dir)
    for entry in manifest["entries"]:
        if entry["plot_id"] == plot_id:
            entry["rating"] = rating
            if note is not None:
                entry["note"] = note
            break
    else:
        raise UnknownPlot(plot_id)
    save_manifest(gallery_dir, manifest)
    _write_summary(gallery_dir, manifest)
    return manifest

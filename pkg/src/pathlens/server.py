"""HTTP service over a gallery directory: manifest, plot points, and ratings.

Endpoints:
    GET  /api/manifest          the gallery manifest JSON
    GET  /api/plots/{plot_id}   the points document for one plot
    POST /api/ratings           {"plot_id": ..., "rating": 1..5, "note"?: ...}
    GET  /...                   static files from the gallery directory; "/"
                                serves viewer/index.html when the viewer
                                assets are installed

Reads hit the manifest file directly, so a restarted server sees every rating
that was persisted. Rating writes are serialized through one lock.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .errors import PathlensError, RatingOutOfRange, UnknownPlot
from .sweep import MANIFEST_NAME, load_manifest, record_rating

_CONTENT_TYPES = {
    ".json": "application/json",
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript",
    ".css": "text/css",
    ".png": "image/png",
    ".csv": "text/csv",
    ".svg": "image/svg+xml",
    ".map": "application/json",
}

_PLACEHOLDER_PAGE = b"""<!doctype html>
<html><head><title>pathlens gallery</title></head>
<body><h1>pathlens gallery</h1>
<p>No viewer assets are installed in this gallery directory.</p>
<p>The API is live: <a href="/api/manifest">/api/manifest</a></p>
</body></html>
"""


class GalleryServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, gallery_dir: Path):
        self.gallery_dir = Path(gallery_dir).resolve()
        if not (self.gallery_dir / MANIFEST_NAME).exists():
            raise PathlensError(f"no {MANIFEST_NAME} in {self.gallery_dir}; run a sweep first")
        self.rating_lock = threading.Lock()
        super().__init__(address, GalleryHandler)


class GalleryHandler(BaseHTTPRequestHandler):
    server: GalleryServer

    def log_message(self, fmt, *args):  # quiet by default; tests hammer the API
        pass

    def _send_json(self, status: int, doc) -> None:
        body = json.dumps(doc).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_bytes(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _entry_for(self, plot_id: str):
        manifest = load_manifest(self.server.gallery_dir)
        for entry in manifest["entries"]:
            if entry["plot_id"] == plot_id:
                return entry
        return None

    def do_GET(self):
        path = self.path.split("?", 1)[0]
        if path == "/api/manifest":
            self._send_json(200, load_manifest(self.server.gallery_dir))
        elif path.startswith("/api/plots/"):
            plot_id = path[len("/api/plots/"):]
            entry = self._entry_for(plot_id)
            if entry is None:
                self._send_json(404, {"error": f"unknown plot_id {plot_id!r}"})
                return
            points_name = entry["files"].get("points")
            points_path = self.server.gallery_dir / points_name if points_name else None
            if entry["error"] is not None or points_path is None or not points_path.exists():
                self._send_json(404, {"error": f"plot {plot_id!r} has no points file"})
                return
            self._send_bytes(200, points_path.read_bytes(), "application/json")
        elif path.startswith("/api/"):
            self._send_json(404, {"error": "unknown endpoint"})
        else:
            self._serve_static(path)

    def _serve_static(self, path: str) -> None:
        root = self.server.gallery_dir
        if path == "/" or path == "/index.html":
            index = root / "viewer" / "index.html"
            if index.exists():
                self._send_bytes(200, index.read_bytes(), _CONTENT_TYPES[".html"])
            else:
                self._send_bytes(200, _PLACEHOLDER_PAGE, _CONTENT_TYPES[".html"])
            return
        target = (root / path.lstrip("/")).resolve()
        if root not in target.parents or not target.is_file():
            self._send_json(404, {"error": "not found"})
            return
        ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self._send_bytes(200, target.read_bytes(), ctype)

    def do_POST(self):
        path = self.path.split("?", 1)[0]
        if path != "/api/ratings":
            self._send_json(404, {"error": "unknown endpoint"})
            return
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length)
        try:
            payload = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            self._send_json(422, {"error": "body must be a JSON object"})
            return
        if not isinstance(payload, dict) or "plot_id" not in payload or "rating" not in payload:
            self._send_json(422, {"error": "payload needs plot_id and rating"})
            return
        plot_id = payload["plot_id"]
        rating = payload["rating"]
        note = payload.get("note")
        if not isinstance(plot_id, str):
            self._send_json(422, {"error": "plot_id must be a string"})
            return
        try:
            with self.server.rating_lock:
                record_rating(self.server.gallery_dir, plot_id, rating, note)
        except RatingOutOfRange as exc:
            self._send_json(422, {"error": str(exc)})
            return
        except UnknownPlot as exc:
            self._send_json(404, {"error": str(exc)})
            return
        self._send_json(200, {"ok": True, "entry": self._entry_for(plot_id)})


def serve(gallery_dir: Path, host: str = "127.0.0.1", port: int = 8000) -> GalleryServer:
    """Construct the server; callers run serve_forever (the CLI does)."""
    return GalleryServer((host, port), gallery_dir)

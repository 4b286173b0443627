"""Single-session HTTP/JSON service for the editor UI and scripts.

Endpoints (JSON request/response unless noted):

    GET  /scene                      current scene document; ETag = content hash
    PUT  /scene                      replace scene (pushes undo)
    POST /render                     {camera?, resolution?, mode} -> PNG or BG3D
    POST /edit                       EditOp JSON -> updated scene document
    POST /undo                       revert last mutation
    POST /save                       {path} -> write scene document to disk
    GET  /blobs/projections?camera=  per-blob projected centroid info

Mutations serialize behind one lock; renders run on an immutable snapshot
outside it. Built on the standard library HTTP server, which is plenty for
a one-scene local editor backend.
"""

from __future__ import annotations

import hashlib
import json
import threading
import urllib.parse
from collections import deque
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .camera import (
    Camera,
    camera_from_json,
    centroid_depth,
    make_camera,
    project,
)
from .errors import (
    BlobfieldError,
    EmptyScene,
    InvalidArgument,
    MalformedDocument,
    SchemaViolation,
)
from .edits import apply_edit
from .pipeline import render_bytes
from .scene import EditOp, SceneLayout, load_scene, sample_scene, save_scene

UNDO_DEPTH = 64
MAX_RESOLUTION = 512
DEFAULT_RESOLUTION = 128


@dataclass
class SessionState:
    scene: SceneLayout
    camera: Camera = field(default_factory=make_camera)
    undo: deque = field(default_factory=lambda: deque(maxlen=UNDO_DEPTH))
    lock: threading.Lock = field(default_factory=threading.Lock)

    def snapshot(self) -> SceneLayout:
        with self.lock:
            return self.scene

    def replace(self, scene: SceneLayout):
        with self.lock:
            self.undo.append(self.scene)
            self.scene = scene

    def pop_undo(self) -> SceneLayout | None:
        with self.lock:
            if not self.undo:
                return None
            self.scene = self.undo.pop()
            return self.scene


def _scene_etag(data: bytes) -> str:
    return '"' + hashlib.sha256(data).hexdigest() + '"'


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "blobfield"

    # -- plumbing ----------------------------------------------------------

    def log_message(self, fmt, *args):  # quiet by default
        if getattr(self.server, "verbose", False):
            super().log_message(fmt, *args)

    @property
    def state(self) -> SessionState:
        return self.server.state

    def _cors(self):
        self.send_header("Access-Control-Allow-Origin", "*")

    def _reply(self, code: int, body: bytes, content_type: str, etag: str | None = None):
        self.send_response(code)
        self._cors()
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        if etag is not None:
            self.send_header("ETag", etag)
        self.end_headers()
        self.wfile.write(body)

    def _reply_json(self, code: int, doc, etag: str | None = None):
        self._reply(code, json.dumps(doc).encode("utf-8"), "application/json", etag)

    def _reply_error(self, code: int, exc: Exception):
        doc = {"error": type(exc).__name__, "message": str(exc)}
        if hasattr(exc, "path"):
            doc["path"] = exc.path
        self._reply_json(code, doc)

    def _read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""

    def _read_json(self):
        body = self._read_body()
        try:
            return json.loads(body.decode("utf-8")) if body else {}
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise MalformedDocument(f"request body is not valid JSON: {exc}") from None

    # -- routes ------------------------------------------------------------

    def do_OPTIONS(self):
        self.send_response(204)
        self._cors()
        self.send_header("Access-Control-Allow-Methods", "GET, PUT, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        url = urllib.parse.urlparse(self.path)
        try:
            if url.path == "/scene":
                data = save_scene(self.state.snapshot())
                self._reply(200, data, "application/json", etag=_scene_etag(data))
            elif url.path == "/blobs/projections":
                self._projections(url)
            else:
                self._reply_json(404, {"error": "NotFound", "message": url.path})
        except BlobfieldError as exc:
            self._reply_error(400, exc)

    def do_PUT(self):
        url = urllib.parse.urlparse(self.path)
        if url.path != "/scene":
            self._reply_json(404, {"error": "NotFound", "message": url.path})
            return
        try:
            scene = load_scene(self._read_body())
        except BlobfieldError as exc:
            self._reply_error(400, exc)
            return
        self.state.replace(scene)
        self._reply(204, b"", "application/json")

    def do_POST(self):
        url = urllib.parse.urlparse(self.path)
        handler = {
            "/render": self._render,
            "/edit": self._edit,
            "/undo": self._undo,
            "/save": self._save,
        }.get(url.path)
        if handler is None:
            self._reply_json(404, {"error": "NotFound", "message": url.path})
            return
        handler()

    # -- endpoint bodies ----------------------------------------------------

    def _render(self):
        try:
            doc = self._read_json()
        except MalformedDocument as exc:
            self._reply_error(400, exc)
            return
        if not isinstance(doc, dict):
            self._reply_error(400, SchemaViolation("$", "body must be an object"))
            return
        resolution = doc.get("resolution", DEFAULT_RESOLUTION)
        if isinstance(resolution, bool) or not isinstance(resolution, int) or resolution < 1:
            self._reply_error(400, SchemaViolation("resolution", "must be a positive integer"))
            return
        if resolution > MAX_RESOLUTION:
            self._reply_error(413, InvalidArgument(
                f"resolution {resolution} exceeds limit {MAX_RESOLUTION}"))
            return
        mode = doc.get("mode", "layout")
        try:
            camera = camera_from_json(doc["camera"]) if "camera" in doc else self.state.camera
        except BlobfieldError as exc:
            self._reply_error(422, exc)
            return
        scene = self.state.snapshot()
        try:
            data, ctype = render_bytes(scene, camera, resolution, mode)
        except InvalidArgument as exc:
            self._reply_error(400, exc)
            return
        self._reply(200, data, ctype)

    def _edit(self):
        try:
            doc = self._read_json()
            op = EditOp.from_json(doc)
        except BlobfieldError as exc:
            self._reply_error(400, exc)
            return
        with self.state.lock:
            try:
                edited = apply_edit(self.state.scene, op)
            except BlobfieldError as exc:
                self._reply_error(400, exc)
                return
            self.state.undo.append(self.state.scene)
            self.state.scene = edited
        data = save_scene(edited)
        self._reply(200, data, "application/json", etag=_scene_etag(data))

    def _undo(self):
        scene = self.state.pop_undo()
        if scene is None:
            self._reply_json(409, {"error": "NothingToUndo", "message": "undo stack is empty"})
            return
        data = save_scene(scene)
        self._reply(200, data, "application/json", etag=_scene_etag(data))

    def _save(self):
        try:
            doc = self._read_json()
        except MalformedDocument as exc:
            self._reply_error(400, exc)
            return
        path = doc.get("path") if isinstance(doc, dict) else None
        if not isinstance(path, str) or not path:
            self._reply_error(400, SchemaViolation("path", "must be a non-empty string"))
            return
        data = save_scene(self.state.snapshot())
        try:
            with open(path, "wb") as fh:
                fh.write(data)
        except OSError as exc:
            self._reply_json(500, {"error": "IOError", "message": str(exc)})
            return
        self._reply_json(200, {"saved": path, "bytes": len(data)})

    def _projections(self, url):
        params = urllib.parse.parse_qs(url.query)
        if "camera" in params:
            try:
                camera = camera_from_json(json.loads(params["camera"][0]))
            except (json.JSONDecodeError, BlobfieldError) as exc:
                self._reply_error(422, exc if isinstance(exc, BlobfieldError)
                                  else MalformedDocument(str(exc)))
                return
        else:
            camera = self.state.camera
        scene = self.state.snapshot()
        entries = []
        for i, blob in enumerate(scene.blobs):
            depth = centroid_depth(camera, blob.center)
            entry = {"index": i, "active": blob.active, "depth": depth}
            if depth > 0.0:
                u, v = project(camera, blob.center)
                entry["u"] = u
                entry["v"] = v
                # screen-space scale: pixels per world unit at the centroid,
                # the linearized projection Jacobian the UI drags against
                entry["px_per_unit_u"] = camera.focal * (camera.width / 2.0) / depth
                entry["px_per_unit_v"] = camera.focal * (camera.height / 2.0) / depth
            else:
                entry["u"] = None
                entry["v"] = None
                entry["px_per_unit_u"] = None
                entry["px_per_unit_v"] = None
            entries.append(entry)
        self._reply_json(200, entries)


class BlobfieldServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, state: SessionState, verbose: bool = False):
        super().__init__(address, _Handler)
        self.state = state
        self.verbose = verbose


def make_server(scene: SceneLayout | None = None, host: str = "127.0.0.1",
                port: int = 8787, seed: int = 7, blob_count: int = 10,
                verbose: bool = False) -> BlobfieldServer:
    if scene is None:
        scene = sample_scene(seed, blob_count)
    return BlobfieldServer((host, port), SessionState(scene=scene), verbose=verbose)


def run_service(host: str = "127.0.0.1", port: int = 8787, seed: int = 7,
                blob_count: int = 10):
    server = make_server(host=host, port=port, seed=seed, blob_count=blob_count,
                         verbose=True)
    print(f"blobfield service on http://{host}:{server.server_address[1]}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()

"""Scene data model: blobs, layouts, edit descriptors, and JSON persistence.

Scene values are immutable after construction; every edit produces a new
value. The JSON codec is deterministic (fixed key order, shortest
round-trip decimals), so ``load(save(s)) == s`` with exact float equality.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    InvalidArgument,
    InvariantViolation,
    MalformedDocument,
    SchemaViolation,
)

SCENE_FORMAT_VERSION = 1

DEFAULT_BLOB_COUNT = 10
DEFAULT_FEATURE_DIM = 768
DEFAULT_STYLE_DIM = 512
# Chosen so a unit-aspect blob at scale ~4 spans roughly 0.2 of the unit cube.
DEFAULT_SHARPNESS = 0.02

EDIT_KINDS = (
    "Move",
    "Remove",
    "Restore",
    "Resize",
    "Reshape",
    "Rotate",
    "Restyle",
    "Duplicate",
    "Swap",
)


def _frozen_array(values, path: str, length: int | None = None) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if length is not None and arr.shape != (length,):
        raise InvariantViolation(path, f"expected {length} values, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise InvariantViolation(f"{path}[{bad}]", "value is not finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Blob:
    """One ellipsoid scene object.

    center lives in normalized scene coordinates [0,1]^3; aspect components
    are in (0, 1]; scale is unconstrained; euler angles are radians.
    """

    center: np.ndarray
    scale: float
    aspect: np.ndarray
    euler: np.ndarray
    feature: np.ndarray
    style: np.ndarray
    active: bool = True

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen_array(self.center, "center", 3))
        object.__setattr__(self, "aspect", _frozen_array(self.aspect, "aspect", 3))
        object.__setattr__(self, "euler", _frozen_array(self.euler, "euler", 3))
        object.__setattr__(self, "feature", _frozen_array(self.feature, "feature"))
        object.__setattr__(self, "style", _frozen_array(self.style, "style"))
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "active", bool(self.active))
        if not math.isfinite(self.scale):
            raise InvariantViolation("scale", "value is not finite")
        for k, a in enumerate(self.aspect):
            if not (0.0 < a <= 1.0):
                raise InvariantViolation(f"aspect[{k}]", f"must be in (0, 1], got {a}")

    def __eq__(self, other):
        if not isinstance(other, Blob):
            return NotImplemented
        return (
            np.array_equal(self.center, other.center)
            and self.scale == other.scale
            and np.array_equal(self.aspect, other.aspect)
            and np.array_equal(self.euler, other.euler)
            and np.array_equal(self.feature, other.feature)
            and np.array_equal(self.style, other.style)
            and self.active == other.active
        )


@dataclass(frozen=True, eq=False)
class SceneLayout:
    """Ordered collection of blobs plus scene-wide constants."""

    blobs: tuple[Blob, ...]
    sharpness: float = DEFAULT_SHARPNESS
    background_feature: np.ndarray = None
    background_style: np.ndarray = None
    feature_dim: int = None
    style_dim: int = None

    def __post_init__(self):
        blobs = tuple(self.blobs)
        if len(blobs) < 1:
            raise InvariantViolation("blobs", "scene must contain at least one blob")
        object.__setattr__(self, "blobs", blobs)
        object.__setattr__(self, "sharpness", float(self.sharpness))
        if not (math.isfinite(self.sharpness) and self.sharpness > 0.0):
            raise InvariantViolation("sharpness", f"must be > 0, got {self.sharpness}")
        d_s = self.feature_dim if self.feature_dim is not None else blobs[0].feature.shape[0]
        d_t = self.style_dim if self.style_dim is not None else blobs[0].style.shape[0]
        object.__setattr__(self, "feature_dim", int(d_s))
        object.__setattr__(self, "style_dim", int(d_t))
        bg_f = self.background_feature if self.background_feature is not None else np.zeros(d_s)
        bg_s = self.background_style if self.background_style is not None else np.zeros(d_t)
        object.__setattr__(self, "background_feature", _frozen_array(bg_f, "background_feature", d_s))
        object.__setattr__(self, "background_style", _frozen_array(bg_s, "background_style", d_t))
        for i, b in enumerate(blobs):
            if b.feature.shape[0] != d_s:
                raise InvariantViolation(f"blobs[{i}].feature", f"length {b.feature.shape[0]} != feature_dim {d_s}")
            if b.style.shape[0] != d_t:
                raise InvariantViolation(f"blobs[{i}].style", f"length {b.style.shape[0]} != style_dim {d_t}")

    def __eq__(self, other):
        if not isinstance(other, SceneLayout):
            return NotImplemented
        return (
            self.blobs == other.blobs
            and self.sharpness == other.sharpness
            and np.array_equal(self.background_feature, other.background_feature)
            and np.array_equal(self.background_style, other.background_style)
            and self.feature_dim == other.feature_dim
            and self.style_dim == other.style_dim
        )

    @property
    def blob_count(self) -> int:
        return len(self.blobs)

    def active_indices(self) -> list[int]:
        return [i for i, b in enumerate(self.blobs) if b.active]

    def with_blob(self, index: int, blob: Blob) -> "SceneLayout":
        """New scene with one blob replaced; all other blobs are shared."""
        blobs = list(self.blobs)
        blobs[index] = blob
        return replace(self, blobs=tuple(blobs))

    def with_appended(self, blob: Blob) -> "SceneLayout":
        return replace(self, blobs=self.blobs + (blob,))


@dataclass(frozen=True)
class EditOp:
    """A tagged scene mutation; ``target2`` is only used by Swap."""

    kind: str
    target: int = 0
    target2: int | None = None
    payload: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in EDIT_KINDS:
            raise InvariantViolation("kind", f"unknown edit kind {self.kind!r}")
        object.__setattr__(self, "payload", tuple(float(v) for v in self.payload))
        for k, v in enumerate(self.payload):
            if not math.isfinite(v):
                raise InvariantViolation(f"payload[{k}]", "value is not finite")

    def to_json(self) -> dict:
        doc = {"kind": self.kind, "target": self.target}
        if self.target2 is not None:
            doc["target2"] = self.target2
        doc["payload"] = list(self.payload)
        return doc

    @classmethod
    def from_json(cls, doc) -> "EditOp":
        if not isinstance(doc, dict):
            raise SchemaViolation("$", "edit op must be a JSON object")
        allowed = {"kind", "target", "target2", "payload"}
        for key in doc:
            if key not in allowed:
                raise SchemaViolation(key, "unknown key")
        kind = doc.get("kind")
        if not isinstance(kind, str) or kind not in EDIT_KINDS:
            raise SchemaViolation("kind", f"must be one of {EDIT_KINDS}")
        target = doc.get("target", 0)
        if isinstance(target, bool) or not isinstance(target, int):
            raise SchemaViolation("target", "must be an integer")
        target2 = doc.get("target2")
        if target2 is not None and (isinstance(target2, bool) or not isinstance(target2, int)):
            raise SchemaViolation("target2", "must be an integer")
        payload = doc.get("payload", [])
        if not isinstance(payload, list) or any(
            isinstance(v, bool) or not isinstance(v, (int, float)) for v in payload
        ):
            raise SchemaViolation("payload", "must be an array of numbers")
        return cls(kind=kind, target=target, target2=target2, payload=tuple(payload))


# --- JSON codec -----------------------------------------------------------

_TOP_KEYS = (
    "version",
    "sharpness",
    "feature_dim",
    "style_dim",
    "background_feature",
    "background_style",
    "blobs",
)
_BLOB_KEYS = ("center", "scale", "aspect", "euler", "feature", "style", "active")


def _require_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(path, f"expected a number, got {type(value).__name__}")
    return float(value)


def _require_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaViolation(path, f"expected an integer, got {type(value).__name__}")
    return value


def _require_vector(value, path: str, length: int) -> list[float]:
    if not isinstance(value, list):
        raise SchemaViolation(path, f"expected an array, got {type(value).__name__}")
    if len(value) != length:
        raise SchemaViolation(path, f"expected {length} entries, got {len(value)}")
    return [_require_number(v, f"{path}[{k}]") for k, v in enumerate(value)]


def _check_keys(doc: dict, keys, path: str):
    for key in doc:
        if key not in keys:
            raise SchemaViolation(f"{path}{key}", "unknown key")
    for key in keys:
        if key not in doc:
            raise SchemaViolation(f"{path}{key}", "missing key")


def load_scene(data: bytes | str) -> SceneLayout:
    """Parse a UTF-8 JSON scene document; see ``save_scene`` for the format."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(f"not valid UTF-8: {exc}") from None
    else:
        text = data

    def _reject_constant(name):
        raise MalformedDocument(f"non-finite constant {name} is not allowed")

    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from None

    if not isinstance(doc, dict):
        raise SchemaViolation("$", "top level must be an object")
    _check_keys(doc, _TOP_KEYS, "")

    version = _require_int(doc["version"], "version")
    if version != SCENE_FORMAT_VERSION:
        raise SchemaViolation("version", f"unsupported version {version}")
    sharpness = _require_number(doc["sharpness"], "sharpness")
    d_s = _require_int(doc["feature_dim"], "feature_dim")
    d_t = _require_int(doc["style_dim"], "style_dim")
    if d_s < 1:
        raise SchemaViolation("feature_dim", "must be >= 1")
    if d_t < 1:
        raise SchemaViolation("style_dim", "must be >= 1")
    bg_feature = _require_vector(doc["background_feature"], "background_feature", d_s)
    bg_style = _require_vector(doc["background_style"], "background_style", d_t)

    raw_blobs = doc["blobs"]
    if not isinstance(raw_blobs, list):
        raise SchemaViolation("blobs", "expected an array")
    if len(raw_blobs) < 1:
        raise InvariantViolation("blobs", "scene must contain at least one blob")

    blobs = []
    for i, raw in enumerate(raw_blobs):
        path = f"blobs[{i}]"
        if not isinstance(raw, dict):
            raise SchemaViolation(path, "expected an object")
        _check_keys(raw, _BLOB_KEYS, f"{path}.")
        center = _require_vector(raw["center"], f"{path}.center", 3)
        scale = _require_number(raw["scale"], f"{path}.scale")
        aspect = _require_vector(raw["aspect"], f"{path}.aspect", 3)
        euler = _require_vector(raw["euler"], f"{path}.euler", 3)
        feature = _require_vector(raw["feature"], f"{path}.feature", d_s)
        style = _require_vector(raw["style"], f"{path}.style", d_t)
        active = raw["active"]
        if not isinstance(active, bool):
            raise SchemaViolation(f"{path}.active", "expected a boolean")
        try:
            blobs.append(
                Blob(center=center, scale=scale, aspect=aspect, euler=euler,
                     feature=feature, style=style, active=active)
            )
        except InvariantViolation as exc:
            raise InvariantViolation(f"{path}.{exc.path}", exc.detail) from None

    try:
        return SceneLayout(
            blobs=tuple(blobs),
            sharpness=sharpness,
            background_feature=bg_feature,
            background_style=bg_style,
            feature_dim=d_s,
            style_dim=d_t,
        )
    except InvariantViolation:
        raise


def save_scene(scene: SceneLayout) -> bytes:
    """Serialize to deterministic UTF-8 JSON.

    Key order is fixed and floats use Python's shortest round-trip repr, so
    two serializations of equal scenes are byte-identical.
    """
    doc = {
        "version": SCENE_FORMAT_VERSION,
        "sharpness": scene.sharpness,
        "feature_dim": scene.feature_dim,
        "style_dim": scene.style_dim,
        "background_feature": [float(v) for v in scene.background_feature],
        "background_style": [float(v) for v in scene.background_style],
        "blobs": [
            {
                "center": [float(v) for v in b.center],
                "scale": b.scale,
                "aspect": [float(v) for v in b.aspect],
                "euler": [float(v) for v in b.euler],
                "feature": [float(v) for v in b.feature],
                "style": [float(v) for v in b.style],
                "active": b.active,
            }
            for b in scene.blobs
        ],
    }
    return json.dumps(doc, separators=(",", ":"), allow_nan=False).encode("utf-8")


def sample_scene(
    seed: int,
    blob_count: int = DEFAULT_BLOB_COUNT,
    feature_dim: int = DEFAULT_FEATURE_DIM,
    style_dim: int = DEFAULT_STYLE_DIM,
) -> SceneLayout:
    """Deterministic random scene for tests and demos.

    Centers ~ U[0.2, 0.8]^3, scale ~ U[2, 6], aspect ~ U[0.3, 1],
    euler ~ U[-pi/4, pi/4]; feature/style entries standard normal.
    """
    if blob_count < 1:
        raise InvalidArgument(f"blob_count must be >= 1, got {blob_count}")
    if feature_dim < 1:
        raise InvalidArgument(f"feature_dim must be >= 1, got {feature_dim}")
    if style_dim < 1:
        raise InvalidArgument(f"style_dim must be >= 1, got {style_dim}")
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0.2, 0.8, size=(blob_count, 3))
    scales = rng.uniform(2.0, 6.0, size=blob_count)
    aspects = rng.uniform(0.3, 1.0, size=(blob_count, 3))
    eulers = rng.uniform(-np.pi / 4, np.pi / 4, size=(blob_count, 3))
    features = rng.standard_normal((blob_count, feature_dim))
    styles = rng.standard_normal((blob_count, style_dim))
    bg_feature = rng.standard_normal(feature_dim)
    bg_style = rng.standard_normal(style_dim)
    blobs = tuple(
        Blob(center=centers[i], scale=scales[i], aspect=aspects[i],
             euler=eulers[i], feature=features[i], style=styles[i])
        for i in range(blob_count)
    )
    return SceneLayout(
        blobs=blobs,
        sharpness=DEFAULT_SHARPNESS,
        background_feature=bg_feature,
        background_style=bg_style,
        feature_dim=feature_dim,
        style_dim=style_dim,
    )

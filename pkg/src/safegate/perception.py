"""Person/face detection seams, LBP face recognition, and description.

Deep detectors stay behind a small backend interface; the shipped
backends echo simulation-manifest boxes or promote motion regions by
shape.  Recognition is nearest-centroid over per-cell LBP histograms
with a chi-square distance, calibrated so far-off queries come back
"unknown".
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import imaging
from .change import region_position
from .imaging import Frame

CROP_SIZE = 96
GRID = 6
CELL = CROP_SIZE // GRID
FEATURE_LEN = GRID * GRID * 256
CHI2_EPS = 1e-10
UNKNOWN_THRESHOLD_FLOOR = 0.5
UNKNOWN = "unknown"


class BackendUnavailableError(RuntimeError):
    """A detection backend is not usable (distinct from "no detections")."""


@dataclass(frozen=True)
class DetectionBox:
    kind: str  # "person" | "face"
    bbox: tuple  # (x, y, w, h)
    confidence: float = 1.0

    def __post_init__(self):
        x, y, w, h = self.bbox
        if w <= 0 or h <= 0:
            raise ValueError("detection box must have positive size")
        if x < 0 or y < 0:
            raise ValueError("detection box must lie inside the frame")


@dataclass(frozen=True)
class PersonInfo:
    person_id: str
    name: str
    contact: str = ""


@dataclass(frozen=True)
class ProfileModel:
    """Enrolled identities: centroids plus the raw per-person features.

    Immutable; enroll() returns a new instance so readers never see a
    half-updated model.
    """

    names: tuple = ()
    centroids: np.ndarray = field(default_factory=lambda: np.zeros((0, FEATURE_LEN)))
    features: tuple = ()  # per person: ndarray (n_crops, FEATURE_LEN)
    unknown_threshold: float = UNKNOWN_THRESHOLD_FLOOR

    @property
    def person_count(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class PersonObservation:
    name: str
    position: str  # left | center | right
    desc_words: tuple = ()

    @property
    def is_known(self) -> bool:
        return self.name != UNKNOWN


@dataclass(frozen=True)
class HairColorRule:
    brown_low: tuple = (10, 100, 20)
    brown_high: tuple = (20, 255, 200)
    blond_low: tuple = (8, 15, 50)
    blond_high: tuple = (20, 240, 230)
    pixel_fraction: float = 0.60
    black_bins: int = 100
    black_fraction: float = 0.50


DEFAULT_HAIR_RULE = HairColorRule()


def extract_lbp_histogram(crop) -> np.ndarray:
    """Concatenated per-cell LBP histograms of a face crop.

    The crop is resized to 96x96, 8-bit neighbor codes are computed for
    interior pixels, and codes are binned into a 6x6 grid of 16x16 cells
    (cells keyed by pixel position in the resized crop, so border cells
    hold slightly fewer codes).  Each cell histogram is L1-normalized.
    """
    px = crop.pixels if isinstance(crop, Frame) else np.asarray(crop)
    if px.shape[0] < 8 or px.shape[1] < 8:
        raise ValueError(f"face crop too small: {px.shape[1]}x{px.shape[0]}")
    gray = imaging.to_grayscale(Frame(px) if not isinstance(crop, Frame) else crop)
    resized = imaging.resize_bilinear(gray, CROP_SIZE, CROP_SIZE)
    from . import kernels

    codes = kernels.lbp_codes(resized.pixels)
    ys, xs = np.mgrid[1 : CROP_SIZE - 1, 1 : CROP_SIZE - 1]
    cells = (ys // CELL) * GRID + (xs // CELL)
    flat = cells.ravel() * 256 + codes.ravel().astype(np.int64)
    counts = np.bincount(flat, minlength=FEATURE_LEN).astype(np.float64)
    per_cell = counts.reshape(GRID * GRID, 256)
    totals = per_cell.sum(axis=1, keepdims=True)
    np.divide(per_cell, totals, out=per_cell, where=totals > 0)
    return per_cell.reshape(FEATURE_LEN)


def chi2_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Chi-square histogram distance with a small epsilon denominator."""
    diff = a - b
    return float((diff * diff / (a + b + CHI2_EPS)).sum())


def _chi2_to_centroids(query: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = centroids - query
    return (diff * diff / (centroids + query + CHI2_EPS)).sum(axis=1)


def _centroid(person_feats: np.ndarray) -> np.ndarray:
    """Mean feature vector, anchored on the first crop.

    Anchoring makes the mean of bit-identical rows return that exact
    row (no accumulated ulp drift), so a re-queried enrollment crop
    reaches distance exactly 0.
    """
    first = person_feats[0]
    return first + (person_feats - first).mean(axis=0)


def _calibrate_threshold(features) -> float:
    """Mean intra-class distance (crop vs own centroid) plus two sigma."""
    dists = []
    for person_feats in features:
        centroid = _centroid(person_feats)
        for vec in person_feats:
            dists.append(chi2_distance(vec, centroid))
    if not dists:
        return UNKNOWN_THRESHOLD_FLOOR
    arr = np.asarray(dists)
    return max(UNKNOWN_THRESHOLD_FLOOR, float(arr.mean() + 2.0 * arr.std()))


def enroll(person, crops, model: ProfileModel | None = None) -> ProfileModel:
    """Add (or extend) one person's face crops; returns a new model.

    ``person`` is a PersonInfo or a bare name.  Re-enrolling an existing
    name appends crops and recomputes that centroid.  The unknown
    threshold recalibrates over all enrolled persons.
    """
    model = model or ProfileModel()
    name = person.name if isinstance(person, PersonInfo) else str(person)
    crops = list(crops)
    if not crops:
        raise ValueError("enroll requires at least one face crop")
    new_feats = np.stack([extract_lbp_histogram(c) for c in crops])

    names = list(model.names)
    features = list(model.features)
    if name in names:
        idx = names.index(name)
        features[idx] = np.concatenate([features[idx], new_feats])
    else:
        names.append(name)
        features.append(new_feats)
    centroids = np.stack([_centroid(f) for f in features])
    threshold = _calibrate_threshold(features)
    return ProfileModel(
        names=tuple(names),
        centroids=centroids,
        features=tuple(features),
        unknown_threshold=threshold,
    )


def recognize_face(crop, model: ProfileModel):
    """Nearest enrolled identity by chi-square distance, or "unknown".

    Returns (name, distance); distance is to the nearest centroid even
    when the verdict is "unknown".
    """
    if model is None or model.person_count == 0:
        raise ValueError("recognition requires a model with at least one person")
    query = extract_lbp_histogram(crop)
    dists = _chi2_to_centroids(query, model.centroids)
    idx = int(np.argmin(dists))
    dist = float(dists[idx])
    if dist > model.unknown_threshold:
        return UNKNOWN, dist
    return model.names[idx], dist


def classify_hair_color(patch, rule: HairColorRule = DEFAULT_HAIR_RULE) -> str:
    """black / brown / blond / gray from histogram and HSV-range fractions.

    Rules fire in that order; the black rule looks at the value channel
    (first `black_bins` intensity bins holding >= half the pixels).
    """
    px = patch.pixels if isinstance(patch, Frame) else np.asarray(patch)
    if px.ndim != 3:
        raise ValueError("hair classification expects an RGB patch")
    hsv = imaging.rgb_to_hsv(px)
    total = hsv.shape[0] * hsv.shape[1]
    values = hsv[..., 2]
    if (values < rule.black_bins).sum() >= rule.black_fraction * total:
        return "black"

    def in_range(low, high):
        inside = np.logical_and.reduce(
            [(hsv[..., i] >= low[i]) & (hsv[..., i] <= high[i]) for i in range(3)]
        )
        return inside.sum() / total

    if in_range(rule.brown_low, rule.brown_high) >= rule.pixel_fraction:
        return "brown"
    if in_range(rule.blond_low, rule.blond_high) >= rule.pixel_fraction:
        return "blond"
    return "gray"


# --- detection backends ---


class OracleBackend:
    """Echoes boxes from a simulation manifest.

    Manifest shape: {"boxes": [{"kind": "face", "bbox": [x,y,w,h],
    "person": ..., "attributes": [...], "items": [...]}]}.  Also serves
    attribute/item words for describe_person.
    """

    def __init__(self, manifest: dict | None):
        if manifest is None or not isinstance(manifest, dict):
            raise BackendUnavailableError("oracle backend needs a manifest")
        self._boxes = []
        self._words = {}
        for entry in manifest.get("boxes", []):
            box = DetectionBox(
                kind=str(entry.get("kind", "person")).lower(),
                bbox=tuple(entry["bbox"]),
                confidence=float(entry.get("confidence", 1.0)),
            )
            self._boxes.append(box)
            self._words[box.bbox] = (
                tuple(entry.get("attributes", ())),
                tuple(entry.get("items", ())),
            )

    def detect_persons(self, frame):
        return [b for b in self._boxes if b.kind == "person"]

    def detect_faces(self, frame):
        return [b for b in self._boxes if b.kind == "face"]

    def words_for(self, box: DetectionBox):
        return self._words.get(box.bbox, ((), ()))


class MotionBackend:
    """Promotes tall-enough motion regions to person boxes.

    A region counts as a person when h/w is in [1.2, 4.0] and its area
    is at least twice the activity area threshold.  Faces are never
    produced (no appearance model at this tier).
    """

    RATIO_LOW = 1.2
    RATIO_HIGH = 4.0

    def __init__(self, regions, area_threshold: int):
        self._regions = tuple(regions)
        self._area_threshold = area_threshold

    def detect_persons(self, frame):
        boxes = []
        for region in self._regions:
            x, y, w, h = region.bbox
            ratio = h / w
            if self.RATIO_LOW <= ratio <= self.RATIO_HIGH and region.area >= 2 * self._area_threshold:
                boxes.append(DetectionBox(kind="person", bbox=(x, y, w, h)))
        return boxes

    def detect_faces(self, frame):
        return []

    def words_for(self, box: DetectionBox):
        return (), ()


class UnavailableBackend:
    """Placeholder for a configured-but-missing deep model."""

    def __init__(self, reason: str = "detector not installed"):
        self._reason = reason

    def detect_persons(self, frame):
        raise BackendUnavailableError(self._reason)

    def detect_faces(self, frame):
        raise BackendUnavailableError(self._reason)

    def words_for(self, box):
        raise BackendUnavailableError(self._reason)


def crop_box(frame, bbox) -> Frame:
    """Cut a bbox out of a frame, clipped to bounds."""
    px = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
    x, y, w, h = bbox
    x0 = max(int(x), 0)
    y0 = max(int(y), 0)
    x1 = min(int(x + w), px.shape[1])
    y1 = min(int(y + h), px.shape[0])
    if x1 <= x0 or y1 <= y0:
        raise ValueError(f"bbox {bbox} lies outside the frame")
    out = px[y0:y1, x0:x1]
    return Frame(np.ascontiguousarray(out))


def _head_patch(frame, face_bbox):
    """Patch covering the hairline: face top quarter plus a strip above."""
    x, y, w, h = face_bbox
    top = max(int(y - h * 0.33), 0)
    bottom = int(y + max(h // 4, 1))
    px = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
    if bottom <= top or px.ndim != 3:
        return None
    patch = px[top:bottom, max(int(x), 0) : min(int(x + w), px.shape[1])]
    if patch.size == 0:
        return None
    return Frame(np.ascontiguousarray(patch))


def describe_person(
    frame,
    person_box: DetectionBox,
    face_box: DetectionBox | None = None,
    model: ProfileModel | None = None,
    hair_rule: HairColorRule = DEFAULT_HAIR_RULE,
    attributes=(),
    items=(),
) -> PersonObservation:
    """Assemble one PersonObservation for a detected person.

    Name comes from face recognition when a face box and a non-empty
    model are present, else "unknown".  Words are the backend-supplied
    attributes, then carried items, then a computed "<color> hair" word
    when a face is visible and no supplied word already names hair.
    """
    width = frame.width if isinstance(frame, Frame) else np.asarray(frame).shape[1]
    position = region_position(person_box.bbox, width)

    name = UNKNOWN
    if face_box is not None and model is not None and model.person_count > 0:
        crop = crop_box(frame, face_box.bbox)
        name, _ = recognize_face(crop, model)

    words = list(attributes) + [w for w in items if w not in attributes]
    if face_box is not None and not any(w.endswith("hair") for w in words):
        patch = _head_patch(frame, face_box.bbox)
        if patch is not None:
            words.insert(0, f"{classify_hair_color(patch, hair_rule)} hair")
    return PersonObservation(name=name, position=position, desc_words=tuple(words))

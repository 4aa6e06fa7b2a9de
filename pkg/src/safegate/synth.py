"""Deterministic synthetic data: labeled change-detection corpus,
procedural face identities, and end-to-end demo fixtures.

Everything is seeded so tests and the shipped fixtures are exactly
reproducible.  The change corpus is labeled by construction: blob sizes
are chosen so each pair's ground truth does not depend on noise draws.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .imaging import Frame, save_frame

CORPUS_SEED = 20240913
FACE_SEED = 771177


# --- labeled change corpus ---

ACTIVE_PAIRS = 110          # blobs 24..60 px, always detected at area 400
SMALL_PAIRS = 40            # blobs 10..18 px, below the 400 area cut
AMBIGUOUS_PAIRS = 10        # blobs 21..23 px, above 400 but labeled inactive
NOISE_PAIRS = 40            # no blob at all
NOISE_SIGMA = 3.0
BLOB_DELTA = 100
CORPUS_FRAME_SIZE = 64


@dataclass(frozen=True)
class LabeledPair:
    prev: Frame
    curr: Frame
    label: bool
    blob_size: int  # 0 for pure-noise pairs


def _base_scene(rng, size):
    ramp = np.linspace(60, 160, size, dtype=np.float64)
    base = ramp[None, :] + ramp[:, None] * 0.3
    base += rng.uniform(-10, 10, (size, size))
    return base.clip(0, 255)


def _noisy(base, rng):
    noisy = base + rng.normal(0.0, NOISE_SIGMA, base.shape)
    return np.floor(noisy + 0.5).clip(0, 255).astype(np.uint8)


def _with_blob(base, rng, side):
    size = base.shape[0]
    x = int(rng.integers(1, size - side - 1))
    y = int(rng.integers(1, size - side - 1))
    out = base.copy()
    patch = out[y : y + side, x : x + side]
    out[y : y + side, x : x + side] = np.where(
        patch <= 150, patch + BLOB_DELTA, patch - BLOB_DELTA
    )
    return out


def change_corpus(seed: int = CORPUS_SEED):
    """200 labeled frame pairs with construction-time ground truth."""
    rng = np.random.default_rng(seed)
    pairs = []

    def add(side, label):
        base = _base_scene(rng, CORPUS_FRAME_SIZE)
        prev = _noisy(base, rng)
        curr_base = _with_blob(base, rng, side) if side else base
        curr = _noisy(curr_base, rng)
        pairs.append(LabeledPair(Frame(prev), Frame(curr), label, side))

    for _ in range(ACTIVE_PAIRS):
        add(int(rng.integers(24, 61)), True)
    for _ in range(SMALL_PAIRS):
        add(int(rng.integers(10, 19)), False)
    for _ in range(AMBIGUOUS_PAIRS):
        add(int(rng.integers(21, 24)), False)
    for _ in range(NOISE_PAIRS):
        add(0, False)
    return pairs


# --- procedural faces ---

FACE_SIZE = 96


def _ellipse_mask(h, w, cy, cx, ry, rx):
    ys, xs = np.mgrid[0:h, 0:w]
    return ((ys - cy) / ry) ** 2 + ((xs - cx) / rx) ** 2 <= 1.0


def generate_face(identity: int, size: int = FACE_SIZE) -> Frame:
    """Grayscale face-like image for one synthetic identity.

    Per-identity geometry (head shape, eye spacing, mouth) plus an
    identity-keyed texture grating gives each identity a distinct LBP
    signature.  Values stay in [20, 180] so photometric jitter up to
    gain 1.3 and offset +20 cannot clip.
    """
    rng = np.random.default_rng(FACE_SEED + identity)
    ys, xs = np.mgrid[0:size, 0:size]
    canvas = np.full((size, size), 150.0)
    canvas += 12.0 * np.sin(xs / (4.0 + identity % 5) + identity)
    canvas += 8.0 * np.sin(ys / (3.0 + identity % 7) * 1.7 + 2 * identity)

    cy, cx = size * 0.52, size * 0.5
    head_ry = size * (0.36 + 0.04 * ((identity * 13) % 5) / 5)
    head_rx = size * (0.27 + 0.05 * ((identity * 7) % 5) / 5)
    head = _ellipse_mask(size, size, cy, cx, head_ry, head_rx)
    canvas[head] = 110.0 + 10.0 * np.cos(
        (xs[head] * (1 + identity % 3) + ys[head] * (2 + identity % 4)) / 6.0
    )

    eye_dx = size * (0.10 + 0.03 * ((identity * 3) % 4) / 4)
    eye_y = cy - size * (0.10 + 0.02 * (identity % 3))
    for sign in (-1, 1):
        eye = _ellipse_mask(size, size, eye_y, cx + sign * eye_dx, size * 0.035, size * 0.05)
        canvas[eye] = 40.0
        brow = _ellipse_mask(
            size, size, eye_y - size * 0.07, cx + sign * eye_dx, size * 0.018, size * 0.06
        )
        canvas[brow] = 60.0 + 5 * (identity % 4)
    nose = _ellipse_mask(size, size, cy + size * 0.05, cx, size * (0.06 + 0.01 * (identity % 3)), size * 0.02)
    canvas[nose] = 85.0
    mouth = _ellipse_mask(
        size, size, cy + size * (0.17 + 0.02 * (identity % 2)), cx, size * 0.025, size * (0.07 + 0.015 * (identity % 3))
    )
    canvas[mouth] = 55.0 + 6 * (identity % 5)

    canvas += rng.normal(0, 2.0, canvas.shape)
    return Frame(np.floor(canvas + 0.5).clip(20, 180).astype(np.uint8))


def photometric_jitter(face: Frame, gain: float, offset: int) -> Frame:
    """Strictly monotone intensity map: round(v * gain) + offset.

    With gain >= 1 the map preserves every >= comparison between pixel
    values, so LBP codes are unchanged; inputs capped at 180 keep the
    output clip-free for gain <= 1.3, offset <= 20.
    """
    if gain < 1.0 or gain > 1.3:
        raise ValueError("gain outside the clip-free band [1.0, 1.3]")
    if offset < 0 or offset > 20:
        raise ValueError("offset outside the clip-free band [0, 20]")
    vals = np.floor(face.pixels.astype(np.float64) * gain + 0.5) + offset
    return face.with_pixels(vals.clip(0, 255).astype(np.uint8))


def salt_noise(face: Frame, count: int, rng) -> Frame:
    """Overwrite `count` random pixels with random values."""
    px = face.pixels.copy()
    ys = rng.integers(0, px.shape[0], count)
    xs = rng.integers(0, px.shape[1], count)
    px[ys, xs] = rng.integers(0, 256, count)
    return face.with_pixels(px)


def face_set(identities: int = 6, crops_per_identity: int = 12, seed: int = FACE_SEED):
    """Enrollment and held-out crops for several identities.

    Returns (names, enrolled, held_out): enrolled crops carry pure
    photometric jitter (LBP-identical to the base face); held-out crops
    add a sprinkle of salt noise on top of unseen jitter parameters.
    """
    rng = np.random.default_rng(seed)
    names = [f"person{i:02d}" for i in range(identities)]
    enrolled = {}
    held_out = {}
    gains = np.linspace(1.0, 1.3, crops_per_identity)
    for i, name in enumerate(names):
        base = generate_face(i)
        enrolled[name] = [
            photometric_jitter(base, float(gains[j]), int(rng.integers(0, 21)))
            for j in range(crops_per_identity)
        ]
        held_out[name] = [
            salt_noise(
                photometric_jitter(base, float(rng.uniform(1.0, 1.3)), int(rng.integers(0, 21))),
                count=15,
                rng=rng,
            )
            for _ in range(5)
        ]
    return names, enrolled, held_out


# --- end-to-end fixtures ---

SCENE_W, SCENE_H = 320, 240
FIXTURE_PERSON = "Reza"
FIXTURE_ATTRIBUTES = ["mustache", "beard", "gray hair"]
FIXTURE_ITEMS = ["gun"]
FACE_BBOX = (128, 40, FACE_SIZE, FACE_SIZE)
PERSON_BBOX = (118, 36, 116, 190)


def _scene_background() -> np.ndarray:
    ys, xs = np.mgrid[0:SCENE_H, 0:SCENE_W]
    base = 140 + 30 * np.sin(xs / 40.0) + 20 * np.cos(ys / 30.0)
    rgb = np.stack([base, base * 0.95, base * 0.9], axis=-1)
    return np.floor(rgb + 0.5).clip(0, 255).astype(np.uint8)


def _paste_person(scene: np.ndarray, face: Frame) -> np.ndarray:
    out = scene.copy()
    px, py, pw, ph = PERSON_BBOX
    out[py : py + ph, px : px + pw] = (60, 64, 70)  # dark clothing block
    fx, fy, fw, fh = FACE_BBOX
    gray_face = face.pixels
    out[fy : fy + fh, fx : fx + fw] = gray_face[..., None]
    return out


def fixture_manifest() -> dict:
    return {
        "boxes": [
            {"kind": "person", "bbox": list(PERSON_BBOX)},
            {
                "kind": "face",
                "bbox": list(FACE_BBOX),
                "person": FIXTURE_PERSON,
                "attributes": FIXTURE_ATTRIBUTES,
                "items": FIXTURE_ITEMS,
            },
        ]
    }


def write_event_fixture(out_dir) -> Path:
    """Two frames: empty scene, then the known person with an item."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scene = _scene_background()
    face = generate_face(0)
    save_frame(Frame(scene), out / "frame000.png")
    save_frame(Frame(_paste_person(scene, face)), out / "frame001.png")
    (out / "frame001.json").write_text(json.dumps(fixture_manifest(), indent=2))
    return out


def write_quiet_fixture(out_dir) -> Path:
    """Two identical frames: nothing to detect, nothing to record."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scene = _scene_background()
    save_frame(Frame(scene), out / "frame000.png")
    save_frame(Frame(scene), out / "frame001.png")
    return out


ENROLL_WINDOW_W, ENROLL_WINDOW_H = 640, 480
ENROLL_FACE_XY = (272, 192)  # centers a 96x96 face in the 640x480 window


def write_enrollment_video(out_dir, identity: int = 0, frames: int = 12) -> Path:
    """Frames of one identity centered in the capture window, with
    per-frame face-box manifests, ready for video enrollment."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = generate_face(identity)
    gains = np.linspace(1.0, 1.3, frames)
    x, y = ENROLL_FACE_XY
    for j in range(frames):
        jittered = photometric_jitter(base, float(gains[j]), offset=(j * 3) % 21)
        canvas = np.full((ENROLL_WINDOW_H, ENROLL_WINDOW_W), 200, np.uint8)
        canvas[y : y + FACE_SIZE, x : x + FACE_SIZE] = jittered.pixels
        save_frame(Frame(canvas), out / f"frame{j:03d}.png")
        manifest = {"boxes": [{"kind": "face", "bbox": [x, y, FACE_SIZE, FACE_SIZE]}]}
        (out / f"frame{j:03d}.json").write_text(json.dumps(manifest))
    return out

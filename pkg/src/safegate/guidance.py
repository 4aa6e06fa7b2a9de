"""Live feedback for profile-photo capture.

face_position labels where a face sits in the camera window so the
capture UI can steer the user; rotation_speed_check flags head turns
fast enough to blur frames; select_enrollment_frames picks up to 50
well-positioned crops spread across a recorded clip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import perception

SMALL_FACE_AREA = 1024  # 32x32
MAX_ROTATION_DEG_PER_S = 20.0
MAX_ENROLLMENT_FRAMES = 50

LABEL_SMALL = "Face is small. come closer"
LABEL_TOP_LEFT = "Face in top left"
LABEL_TOP_RIGHT = "Face in top right"
LABEL_BOTTOM_LEFT = "Face in bottom left"
LABEL_BOTTOM_RIGHT = "Face in bottom right"
LABEL_LEFT = "Face in left edge"
LABEL_TOP = "Face in top edge"
LABEL_RIGHT = "Face in right edge"
LABEL_BOTTOM = "Face in bottom edge"
LABEL_CENTER = "Face in center"

ALL_LABELS = (
    LABEL_SMALL,
    LABEL_TOP_LEFT,
    LABEL_TOP_RIGHT,
    LABEL_BOTTOM_LEFT,
    LABEL_BOTTOM_RIGHT,
    LABEL_LEFT,
    LABEL_TOP,
    LABEL_RIGHT,
    LABEL_BOTTOM,
    LABEL_CENTER,
)


@dataclass(frozen=True)
class FaceBox:
    x: int
    y: int
    width: int
    height: int

    def __post_init__(self):
        if self.x <= 0 or self.y <= 0 or self.width <= 0 or self.height <= 0:
            raise ValueError("face box needs x, y, width, height all positive")


def face_position(window_w: int, window_h: int, box: FaceBox) -> str:
    """Label where the face sits in the capture window.

    Margins extend the box by half its size on the left/top and one and
    a half sizes to the right/bottom; the branch chain checks the small
    face first, then corners, then single edges, then center.  Halves
    use floor division (pixel coordinates).  Note the top-right test
    reuses the top margin (y2 duplicates y1); kept as specified.
    """
    if window_w <= 0 or window_h <= 0:
        raise ValueError("window dimensions must be positive")
    half_w = box.width // 2
    half_h = box.height // 2
    x1 = box.x - half_w
    y1 = box.y - half_h
    x2 = x1 + 3 * half_w
    y2 = box.y - half_h
    x3 = box.x - half_w
    y3 = box.y + 3 * half_h
    x4 = box.x + 3 * half_w
    y4 = box.y + 3 * half_h

    if box.width * box.height <= SMALL_FACE_AREA:
        return LABEL_SMALL
    if x1 <= 0 and y1 <= 0:
        return LABEL_TOP_LEFT
    if x2 >= window_w and y2 <= 0:
        return LABEL_TOP_RIGHT
    if x3 <= 0 and y3 >= window_h:
        return LABEL_BOTTOM_LEFT
    if x4 >= window_w and y4 >= window_h:
        return LABEL_BOTTOM_RIGHT
    if x1 <= 0:
        return LABEL_LEFT
    if y1 <= 0:
        return LABEL_TOP
    if x2 >= window_w:
        return LABEL_RIGHT
    if y4 >= window_h:
        return LABEL_BOTTOM
    return LABEL_CENTER


def rotation_speed_check(samples) -> str:
    """"ok" or "too fast" from timestamped orientation angles.

    ``samples`` is a sequence of (t_seconds, angle_degrees) with strictly
    increasing timestamps; any adjacent rate above 20 deg/s is too fast.
    """
    samples = list(samples)
    if len(samples) < 2:
        raise ValueError("need at least two orientation samples")
    for (t0, a0), (t1, a1) in zip(samples, samples[1:]):
        if t1 <= t0:
            raise ValueError("timestamps must be strictly increasing")
        if abs(a1 - a0) / (t1 - t0) > MAX_ROTATION_DEG_PER_S:
            return "too fast"
    return "ok"


def select_enrollment_frames(frames, face_backend, max_frames: int = MAX_ENROLLMENT_FRAMES):
    """Pick centered-face crops spread across a clip, at most max_frames.

    A frame is eligible when its largest detected face labels as
    centered; boxes that violate the position-check preconditions are
    skipped.  Eligible frames are strided uniformly so the selection
    spans the clip.
    """
    eligible = []
    for frame in frames:
        boxes = face_backend.detect_faces(frame)
        if not boxes:
            continue
        best = max(boxes, key=lambda b: b.bbox[2] * b.bbox[3])
        x, y, w, h = best.bbox
        if x <= 0 or y <= 0 or w <= 0 or h <= 0:
            continue
        label = face_position(frame.width, frame.height, FaceBox(x, y, w, h))
        if label == LABEL_CENTER:
            eligible.append((frame, best.bbox))
    if not eligible:
        return []
    stride = math.ceil(len(eligible) / max_frames)
    picked = eligible[::stride]
    return [perception.crop_box(frame, bbox) for frame, bbox in picked]

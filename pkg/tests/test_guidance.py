"""Capture guidance: position labels, rotation gating, frame selection.

_position_oracle re-derives the label from the margin/branch table
independently, so the sweep test cross-checks two transcriptions of the
same contract.
"""

import numpy as np
import pytest

from safegate import guidance, synth
from safegate.guidance import FaceBox, face_position
from safegate.imaging import Frame
from safegate.perception import DetectionBox


def _position_oracle(win_w, win_h, x, y, w, h):
    if w * h <= 1024:
        return guidance.LABEL_SMALL
    hw, hh = w // 2, h // 2
    at_left = x - hw <= 0
    at_top = y - hh <= 0
    at_right = (x - hw) + 3 * hw >= win_w      # grown box right edge
    at_bottom = y + 3 * hh >= win_h
    far_right = x + 3 * hw >= win_w            # the BR corner margin is wider
    if at_left and at_top:
        return guidance.LABEL_TOP_LEFT
    if at_right and at_top:
        return guidance.LABEL_TOP_RIGHT
    if at_left and at_bottom:
        return guidance.LABEL_BOTTOM_LEFT
    if far_right and at_bottom:
        return guidance.LABEL_BOTTOM_RIGHT
    if at_left:
        return guidance.LABEL_LEFT
    if at_top:
        return guidance.LABEL_TOP
    if at_right:
        return guidance.LABEL_RIGHT
    if at_bottom:
        return guidance.LABEL_BOTTOM
    return guidance.LABEL_CENTER


# --- face_position ---


def test_position_small_face_wins_over_position():
    assert face_position(1280, 720, FaceBox(30, 30, 32, 32)) == guidance.LABEL_SMALL
    # 33x40 = 1320 > 1024: no longer small; x=15 <= 33//2 puts it top-left
    assert face_position(1280, 720, FaceBox(15, 15, 33, 40)) == guidance.LABEL_TOP_LEFT


def test_position_all_ten_labels_reachable():
    cases = {
        (30, 30, 32, 32): guidance.LABEL_SMALL,
        (30, 30, 100, 100): guidance.LABEL_TOP_LEFT,
        (1200, 30, 100, 100): guidance.LABEL_TOP_RIGHT,
        (30, 680, 100, 100): guidance.LABEL_BOTTOM_LEFT,
        (1200, 680, 100, 100): guidance.LABEL_BOTTOM_RIGHT,
        (30, 300, 100, 100): guidance.LABEL_LEFT,
        (600, 30, 100, 100): guidance.LABEL_TOP,
        (1200, 300, 100, 100): guidance.LABEL_RIGHT,
        (600, 680, 100, 100): guidance.LABEL_BOTTOM,
        (590, 310, 100, 100): guidance.LABEL_CENTER,
    }
    got = {face_position(1280, 720, FaceBox(*box)) for box in cases}
    assert got == set(guidance.ALL_LABELS)
    for box, expect in cases.items():
        assert face_position(1280, 720, FaceBox(*box)) == expect, box


def test_position_center_in_small_window():
    assert face_position(640, 480, FaceBox(270, 190, 100, 100)) == guidance.LABEL_CENTER


def test_position_floor_division_margins():
    # width 101: half is 50 (floored), so x=50 gives x1 = 0 -> left contact
    assert face_position(1280, 720, FaceBox(50, 300, 101, 100)) == guidance.LABEL_LEFT
    assert face_position(1280, 720, FaceBox(51, 300, 101, 100)) == guidance.LABEL_CENTER


def test_position_matches_independent_oracle_sweep():
    sizes = [(40, 40), (33, 33), (60, 40), (40, 70), (32, 32), (16, 64)]
    for w, h in sizes:
        for x in range(1, 200, 3):
            for y in range(1, 160, 3):
                got = face_position(200, 160, FaceBox(x, y, w, h))
                want = _position_oracle(200, 160, x, y, w, h)
                assert got == want, (x, y, w, h)


def test_position_validates_inputs():
    with pytest.raises(ValueError):
        FaceBox(0, 10, 50, 50)
    with pytest.raises(ValueError):
        FaceBox(10, 10, 0, 50)
    with pytest.raises(ValueError):
        face_position(0, 720, FaceBox(10, 10, 50, 50))


# --- rotation_speed_check ---


def test_rotation_slow_turn_ok():
    assert guidance.rotation_speed_check([(0.0, 0.0), (1.0, 10.0), (2.0, 15.0)]) == "ok"


def test_rotation_boundary_rate_is_ok():
    # exactly 20 deg/s does not exceed the limit
    assert guidance.rotation_speed_check([(0.0, 0.0), (1.0, 20.0)]) == "ok"
    assert guidance.rotation_speed_check([(0.0, 0.0), (1.0, 20.01)]) == "too fast"


def test_rotation_direction_agnostic():
    assert guidance.rotation_speed_check([(0.0, 30.0), (0.5, 5.0)]) == "too fast"


def test_rotation_any_fast_interval_flags():
    samples = [(0.0, 0.0), (1.0, 5.0), (1.5, 30.0), (2.5, 32.0)]
    assert guidance.rotation_speed_check(samples) == "too fast"


def test_rotation_validates_samples():
    with pytest.raises(ValueError):
        guidance.rotation_speed_check([(0.0, 0.0)])
    with pytest.raises(ValueError):
        guidance.rotation_speed_check([(1.0, 0.0), (1.0, 5.0)])
    with pytest.raises(ValueError):
        guidance.rotation_speed_check([(2.0, 0.0), (1.0, 5.0)])


# --- select_enrollment_frames ---


class _ScriptedFaces:
    """Face backend that looks boxes up per frame identity."""

    def __init__(self):
        self.boxes = {}

    def add(self, frame, boxes):
        self.boxes[id(frame)] = boxes
        return frame

    def detect_faces(self, frame):
        return self.boxes.get(id(frame), [])


def _marker_frame(value, w=640, h=480):
    return Frame(np.full((h, w), value % 256, np.uint8))


CENTER_BOX = (270, 190, 100, 100)


def test_select_takes_every_eligible_frame_when_few():
    backend = _ScriptedFaces()
    frames = []
    for i in range(10):
        f = _marker_frame(i)
        backend.add(f, [DetectionBox("face", CENTER_BOX)])
        frames.append(f)
    crops = guidance.select_enrollment_frames(frames, backend)
    assert len(crops) == 10
    assert all(c.pixels.shape == (100, 100) for c in crops)
    assert [int(c.pixels[0, 0]) for c in crops] == list(range(10))


def test_select_strides_uniformly_across_long_clip():
    backend = _ScriptedFaces()
    frames = [backend.add(_marker_frame(i), [DetectionBox("face", CENTER_BOX)]) for i in range(200)]
    crops = guidance.select_enrollment_frames(frames, backend)
    assert len(crops) == 50
    markers = [int(c.pixels[0, 0]) for c in crops]
    assert markers == list(range(0, 200, 4))  # stride ceil(200/50) = 4


def test_select_never_exceeds_cap():
    backend = _ScriptedFaces()
    frames = [backend.add(_marker_frame(i), [DetectionBox("face", CENTER_BOX)]) for i in range(120)]
    crops = guidance.select_enrollment_frames(frames, backend)
    assert len(crops) <= 50  # stride 3 over 120 eligible -> 40
    assert len(crops) == 40


def test_select_skips_off_center_and_missing_faces():
    backend = _ScriptedFaces()
    good = backend.add(_marker_frame(1), [DetectionBox("face", CENTER_BOX)])
    corner = backend.add(_marker_frame(2), [DetectionBox("face", (30, 30, 100, 100))])
    empty = backend.add(_marker_frame(3), [])
    crops = guidance.select_enrollment_frames([good, corner, empty], backend)
    assert [int(c.pixels[0, 0]) for c in crops] == [1]


def test_select_uses_largest_face_and_skips_bad_boxes():
    backend = _ScriptedFaces()
    # largest box is centered; a tiny decoy in the corner must not win
    both = backend.add(
        _marker_frame(7),
        [DetectionBox("face", (30, 30, 40, 40)), DetectionBox("face", CENTER_BOX)],
    )
    # boxes with x=0 violate the position-check preconditions: skipped
    bad = backend.add(_marker_frame(8), [DetectionBox("face", (0, 190, 120, 120))])
    crops = guidance.select_enrollment_frames([both, bad], backend)
    assert [int(c.pixels[0, 0]) for c in crops] == [7]


def test_select_empty_when_nothing_eligible():
    backend = _ScriptedFaces()
    f = backend.add(_marker_frame(1), [])
    assert guidance.select_enrollment_frames([f], backend) == []


def test_select_on_synthetic_enrollment_clip(tmp_path):
    # the shipped enrollment fixture: every frame centered, 12 frames
    from safegate import cli

    clip_dir = synth.write_enrollment_video(tmp_path / "clip", identity=2, frames=12)
    frames = []
    backend = _ScriptedFaces()
    for i in range(12):
        from safegate.imaging import load_frame

        f = load_frame(clip_dir / f"frame{i:03d}.png")
        backend.add(f, [DetectionBox("face", (272, 192, 96, 96))])
        frames.append(f)
    crops = guidance.select_enrollment_frames(frames, backend)
    assert len(crops) == 12
    assert all(c.pixels.shape == (96, 96) for c in crops)

"""Per-pair activity detection on consecutive frames.

Pipeline: absolute frame difference -> pixel threshold (binary, adaptive
Gaussian, or Otsu) -> binary closing -> 8-connected components -> drop
regions smaller than the area threshold.  A pair has activity when at
least one region survives.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import imaging
from .imaging import Frame

DEFAULT_PIXEL_THRESHOLD = 20
DEFAULT_AREA_THRESHOLD = 400  # 20x20 region


@dataclass(frozen=True)
class ChangeStrategy:
    """Pixel-level thresholding strategy for the difference image."""

    kind: str  # "binary" | "adaptive" | "otsu"
    threshold: int = DEFAULT_PIXEL_THRESHOLD
    block_size: int = 11
    c: float = 2.0

    @staticmethod
    def binary(threshold: int = DEFAULT_PIXEL_THRESHOLD) -> "ChangeStrategy":
        return ChangeStrategy(kind="binary", threshold=threshold)

    @staticmethod
    def adaptive(block_size: int = 11, c: float = 2.0) -> "ChangeStrategy":
        return ChangeStrategy(kind="adaptive", block_size=block_size, c=c)

    @staticmethod
    def otsu() -> "ChangeStrategy":
        return ChangeStrategy(kind="otsu")

    @staticmethod
    def parse(text: str) -> "ChangeStrategy":
        """Parse CLI syntax: binary[:t], adaptive[:block[:c]], otsu."""
        parts = text.strip().lower().split(":")
        name, args = parts[0], parts[1:]
        if name == "binary":
            return ChangeStrategy.binary(int(args[0]) if args else DEFAULT_PIXEL_THRESHOLD)
        if name == "adaptive":
            block = int(args[0]) if args else 11
            c = float(args[1]) if len(args) > 1 else 2.0
            return ChangeStrategy.adaptive(block, c)
        if name == "otsu":
            return ChangeStrategy.otsu()
        raise ValueError(f"unknown strategy {text!r}")

    def describe(self) -> str:
        if self.kind == "binary":
            return f"binary:{self.threshold}"
        if self.kind == "adaptive":
            return f"adaptive:{self.block_size}:{self.c:g}"
        return "otsu"

    def apply(self, diff: Frame) -> Frame:
        if self.kind == "binary":
            return imaging.binary_threshold(diff, self.threshold)
        if self.kind == "adaptive":
            return imaging.adaptive_threshold_gaussian(diff, self.block_size, self.c)
        if self.kind == "otsu":
            return imaging.otsu_threshold(diff)[1]
        raise ValueError(f"unknown strategy kind {self.kind!r}")


@dataclass(frozen=True)
class ChangeConfig:
    strategy: ChangeStrategy = field(default_factory=ChangeStrategy.binary)
    area_threshold: int = DEFAULT_AREA_THRESHOLD
    closing_iterations: int = 1

    def __post_init__(self):
        if self.area_threshold < 1:
            raise ValueError("area_threshold must be >= 1")
        if self.closing_iterations < 0:
            raise ValueError("closing_iterations must be >= 0")


@dataclass(frozen=True)
class ActivityRegion:
    """A changed region large enough to count as activity."""

    bbox: tuple  # (x, y, w, h)
    area: int

    @property
    def center_x(self) -> float:
        x, _, w, _ = self.bbox
        return x + w / 2.0


@dataclass(frozen=True)
class ChangeResult:
    has_activity: bool
    regions: tuple
    changed_pixels: int
    strategy: str

    @property
    def diff_stats(self):
        return (self.changed_pixels, self.strategy)


def frame_diff(prev, curr) -> Frame:
    """Absolute per-pixel difference of two grayscale frames."""
    a = prev.pixels if isinstance(prev, Frame) else np.asarray(prev)
    b = curr.pixels if isinstance(curr, Frame) else np.asarray(curr)
    if a.shape != b.shape:
        raise ValueError(f"frame size mismatch: {a.shape} vs {b.shape}")
    if a.ndim != 2:
        raise ValueError("frame_diff expects grayscale frames")
    diff = np.abs(a.astype(np.int16) - b.astype(np.int16)).astype(np.uint8)
    return curr.with_pixels(diff) if isinstance(curr, Frame) else Frame(diff)


def detect_changes(prev, curr, config: ChangeConfig | None = None) -> ChangeResult:
    """Full change pipeline on one consecutive-frame pair."""
    config = config or ChangeConfig()
    prev_g = imaging.to_grayscale(prev)
    curr_g = imaging.to_grayscale(curr)
    diff = frame_diff(prev_g, curr_g)
    mask = config.strategy.apply(diff)
    changed = int(np.count_nonzero(mask.pixels))
    closed = imaging.binary_closing(mask, config.closing_iterations)
    label_map = imaging.connected_components(closed)
    regions = tuple(
        ActivityRegion(bbox=r.bbox, area=r.area)
        for r in label_map.regions
        if r.area >= config.area_threshold
    )
    return ChangeResult(
        has_activity=bool(regions),
        regions=regions,
        changed_pixels=changed,
        strategy=config.strategy.describe(),
    )


def region_position(region, frame_width: int) -> str:
    """left / center / right from the bbox center against width thirds."""
    if frame_width <= 0:
        raise ValueError("frame_width must be positive")
    cx = region.center_x if isinstance(region, ActivityRegion) else (
        region[0] + region[2] / 2.0
    )
    if cx < frame_width / 3.0:
        return "left"
    if cx < 2.0 * frame_width / 3.0:
        return "center"
    return "right"


def evaluate_strategy(pairs, config: ChangeConfig | None = None):
    """Precision and recall of has_activity over labeled frame pairs.

    ``pairs`` is an iterable of (prev, curr, label).  An empty corpus is
    an error.  A zero denominator (no detections, or no active labels)
    yields 1.0 for that metric.
    """
    tp = fp = fn = 0
    count = 0
    for prev, curr, label in pairs:
        count += 1
        got = detect_changes(prev, curr, config).has_activity
        if got and label:
            tp += 1
        elif got and not label:
            fp += 1
        elif not got and label:
            fn += 1
    if count == 0:
        raise ValueError("empty corpus")
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    return precision, recall

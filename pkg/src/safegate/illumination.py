"""Lighting assessment and non-uniform illumination repair.

Dark scenes are flagged from the intensity histogram; repair applies
gamma correction (Eq.: O = I^(1/gamma) on normalized intensities)
followed by contrast-limited adaptive histogram equalization on the
lightness channel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import imaging, kernels
from .imaging import Frame

DARK_BIN_LIMIT = 74  # bins 0..74, "first 75 bins"
POOR_FRACTION = 0.75
GAMMA_DARK = 1.5
GAMMA_OVEREXPOSED = 0.7
BRIGHT_BIN_START = 181


@dataclass(frozen=True)
class LightingAssessment:
    condition: str  # "good" | "poor"
    dark_fraction: float

    @property
    def poor(self) -> bool:
        return self.condition == "poor"


@dataclass(frozen=True)
class GammaParams:
    gamma: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")


def assess_lighting(frame) -> LightingAssessment:
    """Poor lighting iff >= 75% of grayscale pixels sit in bins 0..74."""
    gray = imaging.to_grayscale(frame)
    hist = imaging.intensity_histogram(gray)
    dark = hist.fraction(0, DARK_BIN_LIMIT)
    condition = "poor" if dark >= POOR_FRACTION else "good"
    return LightingAssessment(condition=condition, dark_fraction=dark)


def select_gamma(frame) -> GammaParams:
    """Pick gamma from the lightness-channel histogram.

    More than half the pixels in bins 0..74 reads as under-exposed
    (gamma 1.5); more than half in bins 181..255 as over-exposed
    (gamma 0.7); otherwise no correction.
    """
    light = imaging.lightness_channel(frame)
    hist = imaging.intensity_histogram(light)
    if hist.fraction(0, DARK_BIN_LIMIT) > 0.5:
        return GammaParams(GAMMA_DARK)
    if hist.fraction(BRIGHT_BIN_START, 255) > 0.5:
        return GammaParams(GAMMA_OVEREXPOSED)
    return GammaParams(1.0)


def gamma_correct(frame, params: GammaParams) -> Frame:
    """Per-channel O = round(255 * (I/255)^(1/gamma)); gamma 1 is identity."""
    if params.gamma == 1.0:
        return frame if isinstance(frame, Frame) else Frame(np.asarray(frame))
    lut = np.floor(
        255.0 * (np.arange(256, dtype=np.float64) / 255.0) ** (1.0 / params.gamma) + 0.5
    ).astype(np.uint8)
    px = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
    out = lut[px]
    return frame.with_pixels(out) if isinstance(frame, Frame) else Frame(out)


def _clip_histogram(hist: np.ndarray, clip_value: int) -> np.ndarray:
    """Clip histogram bins and spread the excess uniformly.

    The remainder after integer division lands on the lowest bins, so
    after redistribution every bin <= clip_value + excess // 256 + 1.
    """
    clipped = np.minimum(hist, clip_value)
    excess = int(hist.sum() - clipped.sum())
    clipped += excess // 256
    rem = excess % 256
    if rem:
        clipped[:rem] += 1
    return clipped


def clahe(frame, clip_limit: float = 2.0, tiles=(8, 8)) -> Frame:
    """Contrast-limited adaptive histogram equalization of one channel.

    ``tiles`` is (rows, cols).  The image is edge-padded to a tile
    multiple, per-tile equalization mappings are built from clipped
    histograms, and each output pixel bilinearly blends the four nearest
    tile mappings.
    """
    ty, tx = tiles
    if ty < 1 or tx < 1:
        raise ValueError("tiles must be >= 1 in both directions")
    if clip_limit <= 0:
        raise ValueError("clip_limit must be positive")
    px = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
    if px.ndim != 2:
        raise ValueError("clahe expects a single channel")
    h, w = px.shape

    tile_h = -(-h // ty)
    tile_w = -(-w // tx)
    pad_y = tile_h * ty - h
    pad_x = tile_w * tx - w
    padded = np.pad(px, ((0, pad_y), (0, pad_x)), mode="edge")

    tile_px = tile_h * tile_w
    clip_value = max(1, int(clip_limit * tile_px / 256.0))
    luts = np.empty((ty, tx, 256), np.uint8)
    for r in range(ty):
        for col in range(tx):
            tile = padded[r * tile_h : (r + 1) * tile_h, col * tile_w : (col + 1) * tile_w]
            hist = np.bincount(tile.ravel(), minlength=256)
            hist = _clip_histogram(hist, clip_value)
            cdf = np.cumsum(hist)
            luts[r, col] = np.floor(cdf * 255.0 / tile_px + 0.5).clip(0, 255).astype(np.uint8)

    out = kernels.clahe_apply(padded, luts, tile_h, tile_w)[:h, :w]
    return frame.with_pixels(out) if isinstance(frame, Frame) else Frame(out)


def normalize_illumination(frame, clip_limit: float = 2.0, tiles=(8, 8)) -> Frame:
    """Gamma correction then CLAHE on the lightness channel.

    Gamma is chosen from the input, applied to all RGB channels, then the
    corrected image moves to Lab where only L is equalized; a and b pass
    through so colors keep their chroma.
    """
    px = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
    if px.ndim != 3:
        raise ValueError("normalize_illumination expects an RGB frame")
    params = select_gamma(frame)
    corrected = gamma_correct(frame if isinstance(frame, Frame) else Frame(px), params)
    lab = imaging.rgb_to_lab(corrected)
    l8 = np.floor(lab[..., 0] * (255.0 / 100.0) + 0.5).clip(0, 255).astype(np.uint8)
    equalized = clahe(Frame(l8), clip_limit, tiles)
    lab[..., 0] = equalized.pixels.astype(np.float64) * (100.0 / 255.0)
    rgb = imaging.lab_to_rgb(lab)
    return frame.with_pixels(rgb) if isinstance(frame, Frame) else Frame(rgb)

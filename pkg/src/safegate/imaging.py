"""Raster primitives shared by the monitoring pipeline.

Frames are 8-bit, row-major, grayscale (h, w) or RGB (h, w, 3).  All
rounding from float to 8-bit uses floor(x + 0.5) so results do not
depend on the platform's banker's rounding.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from . import kernels

GRAY_WEIGHTS = (0.299, 0.587, 0.114)


def _round_u8(values):
    return np.floor(values + 0.5).clip(0, 255).astype(np.uint8)


@dataclass(frozen=True)
class Frame:
    """One captured image plus capture metadata."""

    pixels: np.ndarray
    timestamp_ms: int = 0
    camera_id: str = ""

    def __post_init__(self):
        px = self.pixels
        if not isinstance(px, np.ndarray) or px.dtype != np.uint8:
            raise ValueError("frame pixels must be a uint8 array")
        if px.ndim == 3 and px.shape[2] != 3:
            raise ValueError("color frames must have 3 channels")
        if px.ndim not in (2, 3) or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"bad frame shape {px.shape}")
        if not px.flags.c_contiguous:
            object.__setattr__(self, "pixels", np.ascontiguousarray(px))

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def channels(self):
        return 1 if self.pixels.ndim == 2 else self.pixels.shape[2]

    @property
    def data(self) -> bytes:
        """Row-major raw samples."""
        return self.pixels.tobytes()

    def with_pixels(self, pixels) -> "Frame":
        return Frame(pixels, self.timestamp_ms, self.camera_id)

    def to_png_bytes(self) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(self.pixels).save(buf, format="PNG")
        return buf.getvalue()

    @staticmethod
    def from_png_bytes(data: bytes, timestamp_ms: int = 0, camera_id: str = "") -> "Frame":
        try:
            img = Image.open(io.BytesIO(data))
            img.load()
        except Exception as exc:
            raise ValueError("payload is not a decodable image") from exc
        if img.mode not in ("L", "RGB"):
            img = img.convert("RGB")
        return Frame(np.asarray(img, np.uint8), timestamp_ms, camera_id)


def load_frame(path, timestamp_ms: int = 0, camera_id: str = "") -> Frame:
    with open(path, "rb") as fh:
        return Frame.from_png_bytes(fh.read(), timestamp_ms, camera_id)


def save_frame(frame: Frame, path) -> None:
    with open(path, "wb") as fh:
        fh.write(frame.to_png_bytes())


def _gray_array(frame) -> np.ndarray:
    """Accept a Frame or bare array and return 2-D uint8 pixels."""
    px = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
    if px.ndim != 2:
        raise ValueError("expected a grayscale image")
    if px.dtype != np.uint8:
        raise ValueError("expected uint8 pixels")
    return px


def _like(frame, pixels) -> Frame:
    if isinstance(frame, Frame):
        return frame.with_pixels(pixels)
    return Frame(pixels)


def to_grayscale(frame) -> Frame:
    """ITU-R BT.601 luma; grayscale input passes through unchanged."""
    px = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
    if px.ndim == 2:
        return _like(frame, px)
    r, g, b = GRAY_WEIGHTS
    luma = r * px[..., 0] + g * px[..., 1] + b * px[..., 2]
    return _like(frame, _round_u8(luma))


def rgb_to_hsv(frame) -> np.ndarray:
    """8-bit HSV with hue halved into [0, 180) and S, V in [0, 255]."""
    px = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
    if px.ndim != 3:
        raise ValueError("expected an RGB image")
    rgb = px.astype(np.float64)
    mx = rgb.max(axis=2)
    mn = rgb.min(axis=2)
    delta = mx - mn
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]

    hue = np.zeros_like(mx)
    nz = delta > 0
    rmax = nz & (mx == r)
    gmax = nz & ~rmax & (mx == g)
    bmax = nz & ~rmax & ~gmax
    hue[rmax] = 60.0 * ((g[rmax] - b[rmax]) / delta[rmax])
    hue[gmax] = 60.0 * ((b[gmax] - r[gmax]) / delta[gmax]) + 120.0
    hue[bmax] = 60.0 * ((r[bmax] - g[bmax]) / delta[bmax]) + 240.0
    hue = np.where(hue < 0, hue + 360.0, hue)

    h8 = np.floor(hue / 2.0 + 0.5).astype(np.int64) % 180
    sat = np.zeros_like(mx)
    pos = mx > 0
    sat[pos] = 255.0 * delta[pos] / mx[pos]
    out = np.empty(px.shape, np.uint8)
    out[..., 0] = h8.astype(np.uint8)
    out[..., 1] = _round_u8(sat)
    out[..., 2] = mx.astype(np.uint8)
    return out


# --- CIE Lab (D65), used for the lightness channel ---

_SRGB_TO_LINEAR = None


def _srgb_linear_lut():
    global _SRGB_TO_LINEAR
    if _SRGB_TO_LINEAR is None:
        c = np.arange(256, dtype=np.float64) / 255.0
        _SRGB_TO_LINEAR = np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)
    return _SRGB_TO_LINEAR

_XYZ_MATRIX = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_WHITE = np.array([0.95047, 1.0, 1.08883])
_LAB_DELTA = 6.0 / 29.0


def _lab_f(t):
    return np.where(t > _LAB_DELTA**3, np.cbrt(t), t / (3 * _LAB_DELTA**2) + 4.0 / 29.0)


def rgb_to_lab(frame) -> np.ndarray:
    """Float CIE Lab: L in [0, 100], a/b roughly [-128, 127]."""
    px = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
    if px.ndim != 3:
        raise ValueError("expected an RGB image")
    linear = _srgb_linear_lut()[px]
    xyz = linear @ _XYZ_MATRIX.T / _WHITE
    f = _lab_f(xyz)
    lab = np.empty(px.shape, np.float64)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


def lab_to_rgb(lab: np.ndarray) -> np.ndarray:
    """Inverse of rgb_to_lab with gamut clipping, returns uint8 RGB."""
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0
    f = np.stack([fx, fy, fz], axis=-1)
    t = np.where(f > _LAB_DELTA, f**3, 3 * _LAB_DELTA**2 * (f - 4.0 / 29.0))
    xyz = t * _WHITE
    inv = np.linalg.inv(_XYZ_MATRIX)
    linear = np.clip(xyz @ inv.T, 0.0, 1.0)
    srgb = np.where(
        linear <= 0.0031308, 12.92 * linear, 1.055 * linear ** (1.0 / 2.4) - 0.055
    )
    return _round_u8(srgb * 255.0)


def lightness_channel(frame) -> Frame:
    """Lab L rescaled to 0..255 as a grayscale frame."""
    px = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
    if px.ndim == 2:
        return _like(frame, px)
    lab = rgb_to_lab(frame)
    return _like(frame, _round_u8(lab[..., 0] * (255.0 / 100.0)))


@dataclass(frozen=True)
class Histogram256:
    """256-bin intensity histogram of one grayscale image."""

    counts: np.ndarray
    total: int

    def fraction(self, lo: int, hi: int) -> float:
        """Fraction of samples with intensity in [lo, hi]."""
        if self.total == 0:
            return 0.0
        return float(self.counts[lo : hi + 1].sum()) / self.total


def intensity_histogram(frame) -> Histogram256:
    px = _gray_array(frame)
    counts = np.bincount(px.ravel(), minlength=256)
    return Histogram256(counts=counts, total=int(px.size))


def binary_threshold(frame, threshold: int) -> Frame:
    """255 where pixel > threshold, else 0."""
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold {threshold} outside 0..255")
    px = _gray_array(frame)
    return _like(frame, np.where(px > threshold, 255, 0).astype(np.uint8))


def gaussian_taps(ksize: int) -> np.ndarray:
    """Normalized 1-D Gaussian, sigma tied to the aperture size."""
    if ksize < 3 or ksize % 2 == 0:
        raise ValueError("kernel size must be odd and >= 3")
    sigma = 0.3 * ((ksize - 1) * 0.5 - 1.0) + 0.8
    xs = np.arange(ksize, dtype=np.float64) - (ksize - 1) / 2.0
    taps = np.exp(-(xs**2) / (2.0 * sigma * sigma))
    return taps / taps.sum()


def adaptive_threshold_gaussian(frame, block_size: int = 11, c: float = 2.0) -> Frame:
    """255 where pixel exceeds the local Gaussian-weighted mean minus c."""
    px = _gray_array(frame)
    taps = gaussian_taps(block_size)
    local_mean = kernels.gaussian_blur_sep(px.astype(np.float64), taps)
    out = np.where(px.astype(np.float64) > local_mean - c, 255, 0).astype(np.uint8)
    return _like(frame, out)


def otsu_threshold(frame):
    """Threshold maximizing between-class variance, plus the binarization.

    Evaluated in exact integer arithmetic (cross-multiplied rationals) so
    ties resolve to the smallest threshold with no float round-off.
    Class 0 holds intensities 0..t, class 1 holds t+1..255, matching the
    strict > rule of binary_threshold.  Returns (t, binary frame).
    """
    hist = intensity_histogram(frame)
    counts = [int(v) for v in hist.counts]
    weighted = [i * counts[i] for i in range(256)]
    total = hist.total
    total_sum = sum(weighted)

    best_t = 0
    best_num = 0  # score = num^2 / den, tracked exactly
    best_den = 1
    cnt0 = 0
    sum0 = 0
    for t in range(256):
        cnt0 += counts[t]
        sum0 += weighted[t]
        cnt1 = total - cnt0
        if cnt0 == 0 or cnt1 == 0:
            continue
        num = sum0 * cnt1 - (total_sum - sum0) * cnt0
        den = cnt0 * cnt1
        if num * num * best_den > best_num * den:
            best_t = t
            best_num = num * num
            best_den = den
    return best_t, binary_threshold(frame, best_t)


def _binary_array(frame) -> np.ndarray:
    px = _gray_array(frame)
    vals = np.unique(px)
    if not np.isin(vals, (0, 255)).all():
        raise ValueError("expected a binary 0/255 image")
    return px


def binary_closing(frame, iterations: int = 1) -> Frame:
    """Dilate then erode a 0/255 mask, each repeated `iterations` times."""
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    px = _binary_array(frame)
    out = px
    for _ in range(iterations):
        out = kernels.dilate3(out)
    for _ in range(iterations):
        out = kernels.erode3(out)
    return _like(frame, out)


@dataclass(frozen=True)
class RegionStat:
    """One connected component: bounding box and pixel count."""

    label: int
    x: int
    y: int
    width: int
    height: int
    area: int

    @property
    def bbox(self):
        return (self.x, self.y, self.width, self.height)


@dataclass(frozen=True)
class LabelMap:
    """Component labels (0 = background, 1..K in raster order) plus stats."""

    labels: np.ndarray
    regions: tuple = field(default_factory=tuple)

    @property
    def count(self) -> int:
        return len(self.regions)

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]


def connected_components(frame) -> LabelMap:
    """8-connected components of a binary mask with per-region stats."""
    px = _binary_array(frame)
    labels = kernels.label_components(px)
    nlabels = int(labels.max())
    if nlabels == 0:
        return LabelMap(labels=labels)
    ys, xs = np.nonzero(labels)
    ids = labels[ys, xs]
    areas = np.bincount(ids, minlength=nlabels + 1)
    x0 = np.full(nlabels + 1, px.shape[1], np.int64)
    y0 = np.full(nlabels + 1, px.shape[0], np.int64)
    x1 = np.zeros(nlabels + 1, np.int64)
    y1 = np.zeros(nlabels + 1, np.int64)
    np.minimum.at(x0, ids, xs)
    np.minimum.at(y0, ids, ys)
    np.maximum.at(x1, ids, xs)
    np.maximum.at(y1, ids, ys)
    regions = tuple(
        RegionStat(
            label=k,
            x=int(x0[k]),
            y=int(y0[k]),
            width=int(x1[k] - x0[k] + 1),
            height=int(y1[k] - y0[k] + 1),
            area=int(areas[k]),
        )
        for k in range(1, nlabels + 1)
    )
    return LabelMap(labels=labels, regions=regions)


def resize_bilinear(frame, out_w: int, out_h: int) -> Frame:
    """Bilinear resize with half-pixel centers and edge clamping."""
    if out_w < 1 or out_h < 1:
        raise ValueError("output size must be positive")
    px = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
    in_h, in_w = px.shape[:2]
    fy = (np.arange(out_h, dtype=np.float64) + 0.5) * in_h / out_h - 0.5
    fx = (np.arange(out_w, dtype=np.float64) + 0.5) * in_w / out_w - 0.5
    y0 = np.floor(fy).astype(np.int64)
    x0 = np.floor(fx).astype(np.int64)
    wy = fy - y0
    wx = fx - x0
    y0c = np.clip(y0, 0, in_h - 1)
    y1c = np.clip(y0 + 1, 0, in_h - 1)
    x0c = np.clip(x0, 0, in_w - 1)
    x1c = np.clip(x0 + 1, 0, in_w - 1)
    if px.ndim == 3:
        wyg = wy[:, None, None]
        wxg = wx[None, :, None]
    else:
        wyg = wy[:, None]
        wxg = wx[None, :]
    p = px.astype(np.float64)
    top = (1.0 - wxg) * p[y0c[:, None], x0c[None, :]] + wxg * p[y0c[:, None], x1c[None, :]]
    bot = (1.0 - wxg) * p[y1c[:, None], x0c[None, :]] + wxg * p[y1c[:, None], x1c[None, :]]
    out = (1.0 - wyg) * top + wyg * bot
    return _like(frame, _round_u8(out))

"""Pure numpy implementations of the hot kernels.

Each function here has a jitted twin in numba_backend.py.  The pairs are
kept byte-identical: integer/boolean kernels are exact by construction,
and the float kernels accumulate in the same order so IEEE semantics
give the same bits on both paths.
"""

import numpy as np


def lbp_codes(gray):
    """8-neighbor binary codes for the interior pixels of a grayscale image.

    Bit i is set when neighbor i >= center, neighbors ordered clockwise
    from the top-left, radius 1.  Output shape is (h-2, w-2).
    """
    g = gray.astype(np.int16)
    center = g[1:-1, 1:-1]
    neighbors = (
        g[:-2, :-2],   # top-left
        g[:-2, 1:-1],  # top
        g[:-2, 2:],    # top-right
        g[1:-1, 2:],   # right
        g[2:, 2:],     # bottom-right
        g[2:, 1:-1],   # bottom
        g[2:, :-2],    # bottom-left
        g[1:-1, :-2],  # left
    )
    codes = np.zeros(center.shape, np.uint8)
    for bit, nb in enumerate(neighbors):
        codes |= ((nb >= center).astype(np.uint8)) << np.uint8(bit)
    return codes


def dilate3(binary):
    """3x3 box dilation of a 0/255 mask; pixels past the border count as 0."""
    padded = np.zeros((binary.shape[0] + 2, binary.shape[1] + 2), binary.dtype)
    padded[1:-1, 1:-1] = binary
    out = np.zeros_like(binary)
    for dy in range(3):
        for dx in range(3):
            np.maximum(out, padded[dy : dy + binary.shape[0], dx : dx + binary.shape[1]], out)
    return out


def erode3(binary):
    """3x3 box erosion of a 0/255 mask; pixels past the border count as 255.

    Padding with foreground keeps closing extensive, so solid regions
    touching the frame edge survive.
    """
    padded = np.full((binary.shape[0] + 2, binary.shape[1] + 2), 255, binary.dtype)
    padded[1:-1, 1:-1] = binary
    out = np.full_like(binary, 255)
    for dy in range(3):
        for dx in range(3):
            np.minimum(out, padded[dy : dy + binary.shape[0], dx : dx + binary.shape[1]], out)
    return out


def label_components(fg):
    """8-connected component labels of a 0/255 mask.

    Labels are 1..K, assigned in raster order of each component's first
    pixel; background stays 0.  This flood-fill version is the reference
    the two-pass numba version must match exactly.
    """
    h, w = fg.shape
    labels = np.zeros((h, w), np.int32)
    mask = fg != 0
    next_label = 0
    for y in range(h):
        candidates = np.nonzero(mask[y] & (labels[y] == 0))[0]
        for x in candidates:
            if labels[y, x] != 0:
                continue
            next_label += 1
            stack = [(y, x)]
            labels[y, x] = next_label
            while stack:
                cy, cx = stack.pop()
                for ny in range(max(cy - 1, 0), min(cy + 2, h)):
                    for nx in range(max(cx - 1, 0), min(cx + 2, w)):
                        if mask[ny, nx] and labels[ny, nx] == 0:
                            labels[ny, nx] = next_label
                            stack.append((ny, nx))
    return labels


def _replicate_pad(img, pad_y, pad_x):
    return np.pad(img, ((pad_y, pad_y), (pad_x, pad_x)), mode="edge")


def gaussian_blur_sep(img, taps):
    """Separable convolution with edge-replicated borders.

    ``img`` is float64, ``taps`` a normalized 1-D kernel.  Vertical pass
    first, then horizontal, accumulating tap by tap in index order so the
    result is bit-identical to the jitted loop version.
    """
    h, w = img.shape
    k = taps.shape[0]
    r = k // 2
    padded = _replicate_pad(img, r, 0)
    tmp = np.zeros((h, w), np.float64)
    for i in range(k):
        tmp += taps[i] * padded[i : i + h, :]
    padded = _replicate_pad(tmp, 0, r)
    out = np.zeros((h, w), np.float64)
    for i in range(k):
        out += taps[i] * padded[:, i : i + w]
    return out


def clahe_apply(img, luts, tile_h, tile_w):
    """Bilinear blend of per-tile lookup tables over an image.

    ``img`` is uint8 with shape an exact multiple of the tile size and
    ``luts`` has shape (tiles_y, tiles_x, 256).  Tile centers anchor the
    interpolation grid; coordinates clamp at the edges.
    """
    h, w = img.shape
    ty, tx = luts.shape[0], luts.shape[1]

    ys = np.arange(h, dtype=np.float64)
    fy = (ys + 0.5) / tile_h - 0.5
    r0 = np.floor(fy).astype(np.int64)
    wy = fy - r0
    r0c = np.clip(r0, 0, ty - 1)
    r1c = np.clip(r0 + 1, 0, ty - 1)

    xs = np.arange(w, dtype=np.float64)
    fx = (xs + 0.5) / tile_w - 0.5
    c0 = np.floor(fx).astype(np.int64)
    wx = fx - c0
    c0c = np.clip(c0, 0, tx - 1)
    c1c = np.clip(c0 + 1, 0, tx - 1)

    v = img.astype(np.int64)
    r0g = r0c[:, None]
    r1g = r1c[:, None]
    c0g = c0c[None, :]
    c1g = c1c[None, :]
    top = (1.0 - wx[None, :]) * luts[r0g, c0g, v] + wx[None, :] * luts[r0g, c1g, v]
    bottom = (1.0 - wx[None, :]) * luts[r1g, c0g, v] + wx[None, :] * luts[r1g, c1g, v]
    blended = (1.0 - wy[:, None]) * top + wy[:, None] * bottom
    return np.floor(blended + 0.5).astype(np.uint8)

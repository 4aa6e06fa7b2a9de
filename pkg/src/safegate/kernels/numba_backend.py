"""Numba-jitted implementations of the hot kernels.

Twins of numpy_backend.py.  Loop bodies mirror the vectorized versions
operation for operation so both backends give byte-identical results
(checked in tests/test_kernels.py).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def lbp_codes(gray):
    h, w = gray.shape
    out = np.zeros((h - 2, w - 2), np.uint8)
    for y in range(1, h - 1):
        for x in range(1, w - 1):
            c = gray[y, x]
            code = 0
            if gray[y - 1, x - 1] >= c:
                code |= 1
            if gray[y - 1, x] >= c:
                code |= 2
            if gray[y - 1, x + 1] >= c:
                code |= 4
            if gray[y, x + 1] >= c:
                code |= 8
            if gray[y + 1, x + 1] >= c:
                code |= 16
            if gray[y + 1, x] >= c:
                code |= 32
            if gray[y + 1, x - 1] >= c:
                code |= 64
            if gray[y, x - 1] >= c:
                code |= 128
            out[y - 1, x - 1] = code
    return out


@njit(cache=True)
def dilate3(binary):
    h, w = binary.shape
    out = np.zeros((h, w), binary.dtype)
    for y in range(h):
        y0 = y - 1 if y > 0 else 0
        y1 = y + 2 if y + 2 <= h else h
        for x in range(w):
            x0 = x - 1 if x > 0 else 0
            x1 = x + 2 if x + 2 <= w else w
            best = np.uint8(0)
            for ny in range(y0, y1):
                for nx in range(x0, x1):
                    if binary[ny, nx] > best:
                        best = binary[ny, nx]
            out[y, x] = best
    return out


@njit(cache=True)
def erode3(binary):
    h, w = binary.shape
    out = np.zeros((h, w), binary.dtype)
    for y in range(h):
        y0 = y - 1 if y > 0 else 0
        y1 = y + 2 if y + 2 <= h else h
        for x in range(w):
            x0 = x - 1 if x > 0 else 0
            x1 = x + 2 if x + 2 <= w else w
            worst = np.uint8(255)
            for ny in range(y0, y1):
                for nx in range(x0, x1):
                    if binary[ny, nx] < worst:
                        worst = binary[ny, nx]
            out[y, x] = worst
    return out


@njit(cache=True)
def _find_root(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


@njit(cache=True)
def label_components(fg):
    """Two-pass union-find labeling, 8-connected.

    Provisional labels merge during the raster scan; the second pass
    renumbers roots in raster order of first occurrence, which matches
    the flood-fill reference labeling exactly.
    """
    h, w = fg.shape
    labels = np.zeros((h, w), np.int32)
    parent = np.zeros(h * w // 2 + 2, np.int32)
    nprov = 0
    for y in range(h):
        for x in range(w):
            if fg[y, x] == 0:
                continue
            best = 0
            if x > 0 and labels[y, x - 1] != 0:
                best = _find_root(parent, labels[y, x - 1])
            if y > 0:
                for nx in range(max(x - 1, 0), min(x + 2, w)):
                    lab = labels[y - 1, nx]
                    if lab != 0:
                        root = _find_root(parent, lab)
                        if best == 0:
                            best = root
                        elif root < best:
                            parent[best] = root
                            best = root
                        elif root > best:
                            parent[root] = best
            if best == 0:
                nprov += 1
                parent[nprov] = nprov
                labels[y, x] = nprov
            else:
                labels[y, x] = best
    remap = np.zeros(nprov + 1, np.int32)
    nfinal = 0
    for y in range(h):
        for x in range(w):
            lab = labels[y, x]
            if lab == 0:
                continue
            root = _find_root(parent, lab)
            if remap[root] == 0:
                nfinal += 1
                remap[root] = nfinal
            labels[y, x] = remap[root]
    return labels


@njit(cache=True)
def gaussian_blur_sep(img, taps):
    h, w = img.shape
    k = taps.shape[0]
    r = k // 2

    padded = np.empty((h + 2 * r, w), np.float64)
    for y in range(h + 2 * r):
        sy = y - r
        if sy < 0:
            sy = 0
        elif sy > h - 1:
            sy = h - 1
        for x in range(w):
            padded[y, x] = img[sy, x]
    tmp = np.zeros((h, w), np.float64)
    for i in range(k):
        for y in range(h):
            for x in range(w):
                tmp[y, x] = tmp[y, x] + taps[i] * padded[y + i, x]

    padded2 = np.empty((h, w + 2 * r), np.float64)
    for y in range(h):
        for x in range(w + 2 * r):
            sx = x - r
            if sx < 0:
                sx = 0
            elif sx > w - 1:
                sx = w - 1
            padded2[y, x] = tmp[y, sx]
    out = np.zeros((h, w), np.float64)
    for i in range(k):
        for y in range(h):
            for x in range(w):
                out[y, x] = out[y, x] + taps[i] * padded2[y, x + i]
    return out


@njit(cache=True)
def clahe_apply(img, luts, tile_h, tile_w):
    h, w = img.shape
    ty = luts.shape[0]
    tx = luts.shape[1]
    out = np.empty((h, w), np.uint8)
    for y in range(h):
        fy = (y + 0.5) / tile_h - 0.5
        r0 = int(np.floor(fy))
        wy = fy - r0
        r0c = min(max(r0, 0), ty - 1)
        r1c = min(max(r0 + 1, 0), ty - 1)
        for x in range(w):
            fx = (x + 0.5) / tile_w - 0.5
            c0 = int(np.floor(fx))
            wx = fx - c0
            c0c = min(max(c0, 0), tx - 1)
            c1c = min(max(c0 + 1, 0), tx - 1)
            v = img[y, x]
            top = (1.0 - wx) * luts[r0c, c0c, v] + wx * luts[r0c, c1c, v]
            bottom = (1.0 - wx) * luts[r1c, c0c, v] + wx * luts[r1c, c1c, v]
            blended = (1.0 - wy) * top + wy * bottom
            out[y, x] = np.uint8(np.floor(blended + 0.5))
    return out

"""Inverse-mapping image warp and raster file I/O.

Images are ``uint8`` arrays of shape ``(h, w)`` or ``(h, w, channels)`` with
1, 3 or 4 channels.  Pixel ``(row, col)`` has its centre at continuous
coordinates ``(col + 0.5, row + 0.5)``, which is the frame homographies act
in.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit
from PIL import Image

from .errors import SingularH
from .geometry import check_homography

BILINEAR = "bilinear"
NEAREST = "nearest"


@dataclass(frozen=True)
class WarpSpec:
    """``H`` maps source pixels to canvas pixels; ground points must map with positive w.

    ``clip_line`` optionally restricts sampling to source points with
    ``clip_line . (x, y, 1) >= 0``.
    """

    H: np.ndarray
    size: tuple[int, int]  # canvas (width, height)
    fill: tuple | int = 0
    mode: str = BILINEAR
    clip_line: np.ndarray | None = None

    def __post_init__(self):
        if self.size[0] < 1 or self.size[1] < 1:
            raise ValueError("canvas dimensions must be at least 1")
        if self.mode not in (BILINEAR, NEAREST):
            raise ValueError(f"unknown sampling mode {self.mode!r}")


@njit(cache=True, nogil=True)
def _warp_rows(src, Hi, clip, fill, out, row0, row1, nearest):
    sh, sw, nc = src.shape
    cw = out.shape[1]
    for i in range(row0, row1):
        y = i + 0.5
        bx = Hi[0, 1] * y + Hi[0, 2]
        by = Hi[1, 1] * y + Hi[1, 2]
        bw = Hi[2, 1] * y + Hi[2, 2]
        for j in range(cw):
            x = j + 0.5
            w = Hi[2, 0] * x + bw
            u = 0.0
            v = 0.0
            ok = w > 0.0
            if ok:
                u = (Hi[0, 0] * x + bx) / w
                v = (Hi[1, 0] * x + by) / w
                ok = 0.0 <= u <= sw and 0.0 <= v <= sh and clip[0] * u + clip[1] * v + clip[2] >= 0.0
            if not ok:
                for c in range(nc):
                    out[i, j, c] = fill[c]
                continue
            if nearest:
                col = min(int(u), sw - 1)
                row = min(int(v), sh - 1)
                for c in range(nc):
                    out[i, j, c] = src[row, col, c]
                continue
            fx = u - 0.5
            fy = v - 0.5
            x0 = math.floor(fx)
            y0 = math.floor(fy)
            ax = fx - x0
            ay = fy - y0
            xa = min(max(x0, 0), sw - 1)
            xb = min(max(x0 + 1, 0), sw - 1)
            ya = min(max(y0, 0), sh - 1)
            yb = min(max(y0 + 1, 0), sh - 1)
            for c in range(nc):
                top = src[ya, xa, c] * (1.0 - ax) + src[ya, xb, c] * ax
                bot = src[yb, xa, c] * (1.0 - ax) + src[yb, xb, c] * ax
                val = top * (1.0 - ay) + bot * ay + 0.5
                out[i, j, c] = min(255, max(0, int(val)))


def warp(img: np.ndarray, spec: WarpSpec, workers: int = 1) -> np.ndarray:
    """Warp ``img`` onto the canvas by inverse mapping.

    Rows of the canvas are split into ``workers`` contiguous bands processed
    in parallel threads; every output pixel depends only on its own
    coordinates, so the result is identical for any ``workers``.
    """
    img = np.asarray(img)
    if img.dtype != np.uint8:
        raise TypeError("images must be uint8")
    squeeze = img.ndim == 2
    src = np.ascontiguousarray(img[:, :, None] if squeeze else img)
    if src.shape[2] not in (1, 3, 4):
        raise ValueError("images need 1, 3 or 4 channels")
    H = check_homography(spec.H)
    try:
        Hi = np.linalg.inv(H)
    except np.linalg.LinAlgError as exc:
        raise SingularH("homography is singular") from exc
    nc = src.shape[2]
    fill = np.broadcast_to(np.asarray(spec.fill, dtype=np.uint8).reshape(-1), (nc,)).copy()
    clip = np.zeros(3) if spec.clip_line is None else np.asarray(spec.clip_line, dtype=float)
    if spec.clip_line is None:
        clip[2] = 1.0
    cw, ch = spec.size
    out = np.empty((ch, cw, nc), dtype=np.uint8)
    nearest = spec.mode == NEAREST
    workers = max(1, int(workers))
    if workers == 1:
        _warp_rows(src, Hi, clip, fill, out, 0, ch, nearest)
    else:
        bounds = np.linspace(0, ch, workers + 1).astype(int)
        with ThreadPoolExecutor(workers) as ex:
            futs = [
                ex.submit(_warp_rows, src, Hi, clip, fill, out, int(a), int(b), nearest)
                for a, b in zip(bounds[:-1], bounds[1:])
            ]
            for fu in futs:
                fu.result()
    return out[:, :, 0] if squeeze else out


def rectified_fill(channels: int, transparent: bool = False) -> tuple:
    """Opaque black, or fully transparent for 4-channel output."""
    if channels == 4:
        return (0, 0, 0, 0 if transparent else 255)
    return (0,) * channels


# -- file I/O --------------------------------------------------------------------

SUPPORTED_SUFFIXES = {".png", ".ppm", ".pgm", ".pnm"}


def read_image(path) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() not in SUPPORTED_SUFFIXES:
        raise ValueError(f"unsupported image format {path.suffix!r}")
    with Image.open(path) as im:
        if im.mode not in ("L", "RGB", "RGBA"):
            im = im.convert("RGBA" if "A" in im.mode else "RGB")
        return np.array(im, dtype=np.uint8)


def write_image(path, img: np.ndarray) -> None:
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix not in SUPPORTED_SUFFIXES:
        raise ValueError(f"unsupported image format {path.suffix!r}")
    img = np.asarray(img, dtype=np.uint8)
    if suffix in (".ppm", ".pgm", ".pnm") and img.ndim == 3 and img.shape[2] == 4:
        img = img[:, :, :3]
    if suffix == ".pgm" and img.ndim == 3:
        raise ValueError("PGM holds single-channel images only")
    Image.fromarray(img).save(path)

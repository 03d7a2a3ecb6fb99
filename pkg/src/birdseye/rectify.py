"""Bird's-eye homography from the horizon line and the vertical vanishing point.

The rectifying homography is built as a chain of simple maps::

    H = T_scene @ R_align @ K @ R_tilt @ K^-1 @ Roll

``Roll`` rotates the image about the principal point until the horizon is
level, ``K R_tilt K^-1`` pitches the virtual camera until it looks straight
down, ``R_align`` optionally turns a horizontal vanishing direction onto the
canvas x-axis and ``T_scene`` is a uniform scale plus translation that fits
the rectified ground region onto the output canvas.

The focal length comes from the pole-polar relation ``h ~ omega v_z``.  With
the principal point ``p`` at the image centre this reduces to
``f**2 = |v_z - p| * d(p, h)``, because ``|v_z - p| = f cot(tilt)`` and
``d(p, h) = f tan(tilt)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyRegion,
    NadirDegenerate,
    NotCollinear,
    SameSide,
    UpwardTilt,
    VerticalHorizon,
    VzAtInfinity,
)
from .geometry import (
    EPS,
    as_vec3,
    in_plane_rotation,
    intrinsic_matrix,
    intrinsic_matrix_inv,
    is_at_infinity,
    is_line_at_infinity,
    rot_x,
    rot_z,
)

logger = logging.getLogger(__name__)

DEFAULT_CANVAS = (1000, 1000)
DEFAULT_MAX_SCALE_RATIO = 20.0
COLLINEARITY_TOL = 1e-3


# -- field of view -------------------------------------------------------------

def fov_to_focal(gamma: float, width: float) -> float:
    """Focal length in pixels for a horizontal field of view ``gamma`` (radians)."""
    if not 0 < gamma < math.pi:
        raise ValueError(f"field of view must lie in (0, pi), got {gamma}")
    return (width / 2.0) / math.tan(gamma / 2.0)


def focal_to_fov(f: float, width: float) -> float:
    if not f > 0:
        raise ValueError(f"focal length must be positive, got {f}")
    return 2.0 * math.atan(width / (2.0 * f))


# -- camera parameters from image entities -----------------------------------

def roll_from_horizon(h) -> float:
    """Camera roll in ``(-pi/2, pi/2)`` from a horizon ``a x + b y + c = 0``.

    ``roll = atan(-a / b)``: the slope of the horizon in y-down pixel axes.
    """
    a, b, _ = as_vec3(h)
    n = math.hypot(a, b)
    if n == 0 or abs(b) / n < 1e-12:
        raise VerticalHorizon("horizon is vertical (or at infinity); roll undefined")
    return math.atan(-a / b)


def _principal(width, height) -> np.ndarray:
    return np.array([width / 2.0, height / 2.0])


def horizon_offset(h, p) -> tuple[float, np.ndarray]:
    """Distance from ``p`` to ``h`` and the unit vector from ``p`` towards its foot."""
    a, b, c = as_vec3(h)
    n = math.hypot(a, b)
    if n <= EPS * abs(c):
        raise NadirDegenerate("horizon is the line at infinity")
    s = (a * p[0] + b * p[1] + c) / n
    u = -math.copysign(1.0, s) * np.array([a, b]) / n
    return abs(s), u


def _vz_offset(vz, p) -> np.ndarray:
    vz = as_vec3(vz)
    if is_at_infinity(vz):
        raise VzAtInfinity("vertical vanishing point at infinity: camera untilted, supply f")
    return vz[:2] / vz[2] - p


def pole_polar_check(h, vz, p) -> tuple[float, float, float]:
    """``(|v_z - p|, d(p, h), residual)`` for a horizon / vertical-VP pair.

    ``residual`` is the angle (radians) by which ``p``, ``v_z`` and the foot
    of the perpendicular from ``p`` onto ``h`` miss being collinear.  Raises
    :class:`SameSide` when ``v_z`` and the horizon are not on opposite sides
    of ``p``.
    """
    v = _vz_offset(vz, p)
    d_h, u = horizon_offset(h, p)
    d_v = float(np.hypot(*v))
    if d_h == 0 or d_v == 0:
        raise SameSide("principal point on the horizon or at the vertical vanishing point")
    cosang = -(v @ u) / d_v
    if cosang <= 0:
        raise SameSide("vertical vanishing point on the same side of the principal point as the horizon")
    residual = math.atan2(abs(v[0] * u[1] - v[1] * u[0]) / d_v, cosang)
    return d_v, d_h, residual


def focal_from_h_vz(h, vz, width, height, *, strict=False, tol=COLLINEARITY_TOL, return_residual=False):
    """Focal length (pixels) from the horizon and the vertical vanishing point.

    ``f = sqrt(|v_z - p| * d(p, h))``.  The collinearity residual of ``p``,
    ``v_z`` and the horizon foot is logged when it exceeds ``tol`` and raises
    :class:`NotCollinear` if ``strict``.
    """
    d_v, d_h, residual = pole_polar_check(h, vz, _principal(width, height))
    if residual > tol:
        if strict:
            raise NotCollinear(f"collinearity residual {residual:.3g} rad exceeds {tol}")
        logger.warning("pole-polar collinearity residual %.3g rad", residual)
    f = math.sqrt(d_v * d_h)
    return (f, residual) if return_residual else f


def tilt_from_vz(f: float, vz, p) -> float:
    """Tilt below the horizontal, ``pi/2 - atan(|v_z - p| / f)``; 0 for ``v_z`` at infinity."""
    if not f > 0:
        raise ValueError("focal length must be positive")
    vz = as_vec3(vz)
    if is_at_infinity(vz):
        return 0.0
    d = float(np.hypot(*(vz[:2] / vz[2] - np.asarray(p, dtype=float)[:2])))
    return math.pi / 2 - math.atan(d / f)


def tilt_from_horizon(f: float, h, p) -> float:
    """Tilt below the horizontal, ``atan(d(p, h) / f)``; ``pi/2`` for the line at infinity."""
    if not f > 0:
        raise ValueError("focal length must be positive")
    if is_line_at_infinity(h):
        return math.pi / 2
    d, _ = horizon_offset(h, np.asarray(p, dtype=float)[:2])
    return math.atan(d / f)


# -- homographies ------------------------------------------------------------

def roll_homography(roll: float, f: float, width, height) -> np.ndarray:
    """``K R_z(-roll) K^-1``: rotation about the principal point, independent of ``f``."""
    return intrinsic_matrix(f, width, height) @ rot_z(-roll) @ intrinsic_matrix_inv(f, width, height)


def build_h_rot(f: float, tilt: float, roll: float, width, height) -> np.ndarray:
    """Homography of the virtual camera rotation that levels the horizon and looks straight down.

    The remaining pitch to nadir is ``pi/2 - tilt``.  After the map the
    horizon is the line at infinity and ground points keep a positive third
    coordinate.
    """
    if not 0 < tilt <= math.pi / 2:
        raise UpwardTilt(f"tilt {tilt} rad outside (0, pi/2]")
    if not f > 0:
        raise ValueError("focal length must be positive")
    K = intrinsic_matrix(f, width, height)
    Ki = intrinsic_matrix_inv(f, width, height)
    return K @ rot_x(math.pi / 2 - tilt) @ Ki @ roll_homography(roll, f, width, height)


def canvas_align_angle(H_rot, vp) -> float:
    """Canvas rotation that turns the image of a horizontal vanishing direction
    onto a canvas axis, reduced to ``(-pi/4, pi/4]``."""
    d = np.asarray(H_rot, dtype=float) @ as_vec3(vp)
    phi = math.atan2(d[1], d[0])
    a = -phi
    q = math.pi / 2
    a = a - q * round(a / q)
    if a <= -math.pi / 4:
        a += q
    return a


def _clip_polygon(poly: np.ndarray, lin: np.ndarray) -> np.ndarray:
    """Keep the part of a convex polygon where ``lin . (x, y, 1) >= 0``."""
    out = []
    n = len(poly)
    vals = poly @ lin[:2] + lin[2]
    for i in range(n):
        j = (i + 1) % n
        pi, pj, vi, vj = poly[i], poly[j], vals[i], vals[j]
        if vi >= 0:
            out.append(pi)
        if (vi >= 0) != (vj >= 0):
            t = vi / (vi - vj)
            out.append(pi + t * (pj - pi))
    return np.array(out).reshape(-1, 2)


def _map_points(H: np.ndarray, xy: np.ndarray) -> np.ndarray:
    ph = np.column_stack([xy, np.ones(len(xy))]) @ H.T
    return ph[:, :2] / ph[:, 2:3]


@dataclass(frozen=True)
class CanvasFit:
    T: np.ndarray
    size: tuple[int, int]
    region: np.ndarray  # retained source polygon, pixels
    clip_line: np.ndarray  # retained source pixels satisfy clip_line . x >= 0


def fit_canvas(H_pre, width, height, canvas=DEFAULT_CANVAS, max_scale_ratio=DEFAULT_MAX_SCALE_RATIO) -> CanvasFit:
    """Scale-and-translate map fitting the rectified ground region onto ``canvas``.

    Source pixels close to the horizon map arbitrarily far away, so only the
    part of the image whose linear magnification is within
    ``max_scale_ratio`` of the nearest ground row is kept: the third
    coordinate of ``H_pre @ x`` is proportional to the distance from the
    horizon, and rows with ``w < w_max / max_scale_ratio`` are dropped.  The
    bounding box of the retained region's image is then fitted inside the
    canvas with a uniform scale, centred.
    """
    H_pre = np.asarray(H_pre, dtype=float)
    cw, ch = int(canvas[0]), int(canvas[1])
    if cw < 1 or ch < 1:
        raise ValueError("canvas dimensions must be at least 1")
    if not max_scale_ratio > 1:
        raise ValueError("max_scale_ratio must exceed 1")
    corners = np.array([[0.0, 0.0], [width, 0.0], [width, height], [0.0, height]])
    row = H_pre[2]
    w = corners @ row[:2] + row[2]
    w_max = w.max()
    if not w_max > 0:
        raise EmptyRegion("no source pixel lies below the horizon")
    clip = row - np.array([0.0, 0.0, w_max / max_scale_ratio])
    region = _clip_polygon(corners, clip)
    if len(region) < 3:
        raise EmptyRegion("horizon margin leaves no source rows")
    mapped = _map_points(H_pre, region)
    lo = mapped.min(axis=0)
    hi = mapped.max(axis=0)
    span = hi - lo
    if not np.all(span > 0):
        raise EmptyRegion("retained region maps to a degenerate box")
    s = min(cw / span[0], ch / span[1])
    tx = (cw - s * span[0]) / 2.0 - s * lo[0]
    ty = (ch - s * span[1]) / 2.0 - s * lo[1]
    T = np.array([[s, 0.0, tx], [0.0, s, ty], [0.0, 0.0, 1.0]])
    return CanvasFit(T=T, size=(cw, ch), region=region, clip_line=clip)


def local_scale(H, xy) -> float:
    """Canvas pixels per source pixel along the source x direction at ``xy``."""
    H = np.asarray(H, dtype=float)
    x = np.array([xy[0], xy[1], 1.0])
    q = H @ x
    y = q[:2] / q[2]
    col = (H[:2, 0] - y * H[2, 0]) / q[2]
    return float(np.hypot(*col))


# -- full pipeline ---------------------------------------------------------------

@dataclass(frozen=True)
class RectifyInput:
    """Geometric inputs for one image (pixel coordinates).

    ``vz`` may be omitted when ``focal`` is known.  ``align_angle`` is a
    canvas rotation in radians; alternatively ``horizontal_vp`` gives a
    horizontal vanishing point from which the rotation is derived.
    """

    horizon: np.ndarray
    width: float
    height: float
    vz: np.ndarray | None = None
    focal: float | None = None
    align_angle: float | None = None
    horizontal_vp: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "horizon", as_vec3(self.horizon))
        if self.vz is not None:
            object.__setattr__(self, "vz", as_vec3(self.vz))
        if self.horizontal_vp is not None:
            object.__setattr__(self, "horizontal_vp", as_vec3(self.horizontal_vp))
        if self.vz is None and self.focal is None:
            raise ValueError("either the vertical vanishing point or the focal length is required")


@dataclass(frozen=True)
class RectifyResult:
    H: np.ndarray
    f: float
    tilt: float
    roll: float
    canvas_size: tuple[int, int]
    scale: float
    H_rot: np.ndarray
    T_scene: np.ndarray
    align_angle: float = 0.0
    clip_line: np.ndarray | None = None
    region: np.ndarray | None = None
    residual: float = 0.0
    condition: float = float("nan")
    tilt_estimates: tuple = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return {
            "H": self.H.tolist(),
            "f": self.f,
            "tilt": self.tilt,
            "roll": self.roll,
            "canvas": list(self.canvas_size),
            "scale": self.scale,
            "align_angle": self.align_angle,
            "clip_line": None if self.clip_line is None else self.clip_line.tolist(),
            "pole_polar_residual": self.residual,
            "condition": self.condition,
        }


def compose_full(inp: RectifyInput, canvas=DEFAULT_CANVAS, max_scale_ratio=DEFAULT_MAX_SCALE_RATIO) -> RectifyResult:
    """Recover focal length, tilt and roll and compose the bird's-eye homography."""
    W, Hh = inp.width, inp.height
    p = _principal(W, Hh)
    residual = 0.0

    if is_line_at_infinity(inp.horizon):
        if inp.focal is None:
            raise NadirDegenerate("overhead view: focal length cannot be recovered, supply f")
        f, tilt, roll = float(inp.focal), math.pi / 2, 0.0
        tilts = (tilt,)
    else:
        roll = roll_from_horizon(inp.horizon)
        Roll = roll_homography(roll, 1.0, W, Hh)
        lev = np.linalg.solve(Roll.T, inp.horizon)  # horizon after removing roll
        if (lev[0] * p[0] + lev[1] * p[1] + lev[2]) / lev[1] <= 0:
            raise UpwardTilt("horizon is not above the principal point: camera not pitched downwards")
        if inp.focal is not None:
            f = float(inp.focal)
            if inp.vz is not None and not is_at_infinity(inp.vz):
                _, _, residual = pole_polar_check(inp.horizon, inp.vz, p)
        else:
            f, residual = focal_from_h_vz(inp.horizon, inp.vz, W, Hh, return_residual=True)
        tilts = [tilt_from_horizon(f, inp.horizon, p)]
        if inp.vz is not None and not is_at_infinity(inp.vz):
            tilts.append(tilt_from_vz(f, inp.vz, p))
        tilts = tuple(tilts)
        tilt = sum(tilts) / len(tilts)

    H_rot = build_h_rot(f, tilt, roll, W, Hh)

    if inp.align_angle is not None:
        align = float(inp.align_angle)
    elif inp.horizontal_vp is not None:
        align = canvas_align_angle(H_rot, inp.horizontal_vp)
    else:
        align = 0.0
    R_align = in_plane_rotation(align)
    H_pre = R_align @ H_rot

    fit = fit_canvas(H_pre, W, Hh, canvas=canvas, max_scale_ratio=max_scale_ratio)
    H = fit.T @ H_pre
    Hn = H / np.abs(H).max()
    return RectifyResult(
        H=H,
        f=f,
        tilt=tilt,
        roll=roll,
        canvas_size=fit.size,
        scale=local_scale(H, p),
        H_rot=H_rot,
        T_scene=fit.T,
        align_angle=align,
        clip_line=fit.clip_line,
        region=fit.region,
        residual=residual,
        condition=float(np.linalg.cond(Hn)),
        tilt_estimates=tilts,
    )


def rectify(horizon, width, height, vz=None, *, focal=None, align_angle=None, horizontal_vp=None, **kw) -> RectifyResult:
    """Convenience wrapper around :func:`compose_full`."""
    inp = RectifyInput(
        horizon=horizon,
        width=width,
        height=height,
        vz=vz,
        focal=focal,
        align_angle=align_angle,
        horizontal_vp=horizontal_vp,
    )
    return compose_full(inp, **kw)

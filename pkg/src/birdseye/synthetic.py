"""Synthetic cameras and their exact vanishing geometry.

Cameras are sampled from the distributions used for the synthetic training
set (height, tilt, truncated-normal roll, field of view, yaw, image size) and
turned into annotation records: the three orthogonal vanishing points
``K r_1, K r_2, K r_3``, the horizon ``v_x x v_y`` and their finite codes.
No images are rendered; :func:`project_ground_points` is the pinhole
projection used as an oracle by the tests and demos.

World frame: X east, Y north, Z up, ground plane Z = 0, camera centre at
``(0, 0, cam_height)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import DegenerateCamera
from .geometry import WORLD_TO_LEVEL, CameraIntrinsics, rotation_from_angles
from .rectify import fov_to_focal, focal_to_fov
from .sphere import CodecFrame, encode_geometry, encode_horizontal_vp

DEFAULT_IMAGE_SIZES = ((640, 480), (1280, 720), (1920, 1080), (1000, 1000))


@dataclass(frozen=True)
class SamplingConfig:
    """Sampling ranges; angles in degrees, heights in metres."""

    height_range: tuple[float, float] = (1.7, 20.0)
    tilt_max: float = 40.0
    tilt_min: float = 0.0  # exclusive lower bound
    roll_sigma: float = 5.0
    roll_limit: float = 30.0
    fov_range: tuple[float, float] = (15.0, 115.0)
    yaw_range: tuple[float, float] = (0.0, 360.0)
    image_sizes: tuple = DEFAULT_IMAGE_SIZES
    seed: int = 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["image_sizes"] = [list(s) for s in self.image_sizes]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SamplingConfig":
        d = dict(d)
        for k in ("height_range", "fov_range", "yaw_range"):
            if k in d:
                d[k] = tuple(d[k])
        if "image_sizes" in d:
            d["image_sizes"] = tuple(tuple(s) for s in d["image_sizes"])
        return cls(**d)


@dataclass(frozen=True)
class CameraModel:
    """Pinhole camera over the ground plane. Angles in radians."""

    f: float
    width: int
    height: int
    tilt: float
    roll: float = 0.0
    yaw: float = 0.0
    cam_height: float = 1.7

    @property
    def intrinsics(self) -> CameraIntrinsics:
        return CameraIntrinsics(self.f, self.width, self.height)

    @property
    def K(self) -> np.ndarray:
        return self.intrinsics.K

    @property
    def R(self) -> np.ndarray:
        """World -> camera rotation."""
        return rotation_from_angles(self.tilt, self.roll, self.yaw) @ WORLD_TO_LEVEL

    @property
    def center(self) -> np.ndarray:
        return np.array([0.0, 0.0, self.cam_height])

    @property
    def t(self) -> np.ndarray:
        return -self.R @ self.center

    @property
    def P(self) -> np.ndarray:
        return self.K @ np.column_stack([self.R, self.t])

    @property
    def fov(self) -> float:
        return focal_to_fov(self.f, self.width)

    @classmethod
    def from_fov(cls, fov: float, width: int, height: int, **kw) -> "CameraModel":
        return cls(f=fov_to_focal(fov, width), width=width, height=height, **kw)


def _truncated_normal(rng: np.random.Generator, sigma: float, limit: float) -> float:
    while True:
        x = rng.normal(0.0, sigma)
        if -limit <= x <= limit:
            return x


def sample_camera(cfg: SamplingConfig, rng: np.random.Generator) -> CameraModel:
    """Draw one camera; deterministic given the generator state."""
    h = rng.uniform(*cfg.height_range)
    # uniform on (tilt_min, tilt_max]: 1 - U is in (0, 1]
    tilt = cfg.tilt_min + (cfg.tilt_max - cfg.tilt_min) * (1.0 - rng.random())
    roll = _truncated_normal(rng, cfg.roll_sigma, cfg.roll_limit)
    fov = rng.uniform(*cfg.fov_range)
    yaw = rng.uniform(*cfg.yaw_range)
    w, hh = cfg.image_sizes[int(rng.integers(len(cfg.image_sizes)))]
    return CameraModel.from_fov(
        math.radians(fov),
        int(w),
        int(hh),
        tilt=math.radians(tilt),
        roll=math.radians(roll),
        yaw=math.radians(yaw),
        cam_height=h,
    )


def sample_cameras(cfg: SamplingConfig, n: int) -> Iterator[CameraModel]:
    rng = np.random.default_rng(cfg.seed)
    for _ in range(n):
        yield sample_camera(cfg, rng)


@dataclass
class AnnotationRecord:
    """Ground truth for one image.

    ``R`` is row-major; vanishing points and the horizon are homogeneous pixel
    coordinates.  ``v_z`` is the image of the downward direction, so its third
    coordinate is nonnegative, and the horizon is scaled to ``a**2 + b**2 == 1``
    with the ground side positive.  ``encoded`` holds the horizon code and the
    ``v_z`` code; ``theta_align`` codes ``v_x`` on the horizon.
    """

    camera_id: str
    intrinsics: dict
    extrinsics: dict
    R: list
    v_x: list
    v_y: list
    v_z: list
    horizon: list
    encoded: list
    theta_align: float

    @property
    def width(self) -> float:
        return self.intrinsics["w"]

    @property
    def height(self) -> float:
        return self.intrinsics["h"]

    @property
    def f(self) -> float:
        return self.intrinsics["f"]

    @property
    def frame(self) -> CodecFrame:
        return CodecFrame(self.width, self.height)

    def camera(self) -> CameraModel:
        e = self.extrinsics
        return CameraModel(
            f=self.f, width=self.width, height=self.height,
            tilt=e["tilt"], roll=e["roll"], yaw=e["yaw"], cam_height=e["height"],
        )

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_dict(cls, d: dict) -> "AnnotationRecord":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__})


def ground_truth(cam: CameraModel, camera_id: str = "0") -> AnnotationRecord:
    K, R = cam.K, cam.R
    v_x = K @ R[:, 0]
    v_y = K @ R[:, 1]
    v_z = -K @ R[:, 2]  # image of world-down
    h = np.cross(v_x, v_y)
    h = h / math.hypot(h[0], h[1])
    if h @ v_z < 0:
        h = -h
    frame = CodecFrame(cam.width, cam.height)
    return AnnotationRecord(
        camera_id=str(camera_id),
        intrinsics={"f": cam.f, "w": cam.width, "h": cam.height},
        extrinsics={"tilt": cam.tilt, "roll": cam.roll, "yaw": cam.yaw, "height": cam.cam_height},
        R=R.reshape(-1).tolist(),
        v_x=v_x.tolist(),
        v_y=v_y.tolist(),
        v_z=v_z.tolist(),
        horizon=h.tolist(),
        encoded=encode_geometry(h, v_z, frame).tolist(),
        theta_align=encode_horizontal_vp(h, v_x, frame),
    )


# -- projection oracle ---------------------------------------------------------

def ground_homography(cam: CameraModel) -> np.ndarray:
    """Ground plane ``(X, Y, 1)`` -> homogeneous pixel, ``K [r1 r2 t]``."""
    R, t = cam.R, cam.t
    return cam.K @ np.column_stack([R[:, 0], R[:, 1], t])


@dataclass
class GroundProjection:
    world: np.ndarray  # (N, 2) metres
    image: np.ndarray  # (N, 2) pixels
    behind: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))


def project_ground_points(cam: CameraModel, world_xy) -> GroundProjection:
    """Pinhole projection of ground points ``(X, Y)``; points not in front of the camera are set aside."""
    if not cam.cam_height > 0:
        raise DegenerateCamera("camera must be above the ground plane")
    world_xy = np.asarray(world_xy, dtype=float).reshape(-1, 2)
    Xw = np.column_stack([world_xy, np.zeros(len(world_xy))])
    Xc = Xw @ cam.R.T + cam.t
    front = Xc[:, 2] > 0
    x = Xc[front] @ cam.K.T
    return GroundProjection(world=world_xy[front], image=x[:, :2] / x[:, 2:3], behind=world_xy[~front])


def optical_axis_ground_point(cam: CameraModel) -> np.ndarray:
    """Where the optical axis meets the ground (X, Y)."""
    d = cam.R[2]  # optical axis in world coordinates
    if d[2] >= 0:
        raise DegenerateCamera("optical axis does not meet the ground")
    lam = -cam.cam_height / d[2]
    return lam * d[:2]


def project_ground_grid(cam: CameraModel, extent: float, spacing: float, center=None) -> GroundProjection:
    """Project a square grid of side ``extent`` metres with ``spacing`` metres between nodes.

    The grid is centred on ``center`` (defaults to the ground point on the
    optical axis).
    """
    if center is None:
        center = optical_axis_ground_point(cam)
    n = int(round(extent / spacing)) + 1
    offs = (np.arange(n) - (n - 1) / 2.0) * spacing
    gx, gy = np.meshgrid(offs + center[0], offs + center[1])
    return project_ground_points(cam, np.column_stack([gx.ravel(), gy.ravel()]))


# -- dataset files -------------------------------------------------------------

def generate_records(cfg: SamplingConfig, n: int) -> Iterator[AnnotationRecord]:
    for i, cam in enumerate(sample_cameras(cfg, n)):
        yield ground_truth(cam, camera_id=f"{cfg.seed}-{i:06d}")


def write_dataset(path, records: Iterable[AnnotationRecord], cfg: SamplingConfig, n: int) -> int:
    manifest = {"manifest": {"format": "birdseye-annotations", "version": 1, "n": n, "seed": cfg.seed, "config": cfg.to_dict()}}
    count = 0
    with open(path, "w") as fh:
        fh.write(json.dumps(manifest) + "\n")
        for rec in records:
            fh.write(rec.to_json() + "\n")
            count += 1
    return count


def read_dataset(path) -> tuple[dict | None, list[AnnotationRecord]]:
    """Read an annotation file; returns ``(manifest or None, records)``."""
    manifest = None
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            d = json.loads(line)
            if "manifest" in d:
                manifest = d["manifest"]
                continue
            records.append(AnnotationRecord.from_dict(d))
    return manifest, records

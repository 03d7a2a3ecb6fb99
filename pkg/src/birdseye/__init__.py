"""Bird's-eye view rectification of a single image.

The rectifying homography is determined by the horizon line and the vertical
vanishing point (or by the horizon alone when the focal length is known).
"""

from .bins import BinSpec, decode_topc, encode_scalar
from .errors import BirdseyeError, GeometryError
from .evaluation import auc, horizon_error, parameter_errors, video_average
from .geometry import CameraIntrinsics, cross, rotation_from_angles
from .imaging import WarpSpec, read_image, warp, write_image
from .rectify import RectifyInput, RectifyResult, compose_full, focal_from_h_vz, rectify
from .sphere import CodecFrame, decode_geometry, decode_line, decode_point, encode_geometry, encode_line, encode_point
from .synthetic import AnnotationRecord, CameraModel, SamplingConfig, generate_records, ground_truth, sample_camera

__all__ = [
    "AnnotationRecord",
    "BinSpec",
    "BirdseyeError",
    "CameraIntrinsics",
    "CameraModel",
    "CodecFrame",
    "GeometryError",
    "RectifyInput",
    "RectifyResult",
    "SamplingConfig",
    "WarpSpec",
    "auc",
    "compose_full",
    "cross",
    "decode_geometry",
    "decode_line",
    "decode_point",
    "decode_topc",
    "encode_geometry",
    "encode_line",
    "encode_point",
    "encode_scalar",
    "focal_from_h_vz",
    "generate_records",
    "ground_truth",
    "horizon_error",
    "parameter_errors",
    "read_image",
    "rectify",
    "rotation_from_angles",
    "sample_camera",
    "video_average",
    "warp",
    "write_image",
]

__version__ = "0.1.0"

"""Horizon AUC, camera-parameter errors and running averages over video frames."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import EmptyInput, VerticalLine
from .geometry import as_vec3
from .rectify import focal_to_fov

#: Error cutoff for the horizon AUC (fraction of image height).
DEFAULT_TAU = 0.25


def _height_at(l: np.ndarray, x: float) -> float:
    a, b, c = l
    return -(a * x + c) / b


def horizon_error(gt, est, width: float, height: float) -> float:
    """Largest vertical gap between two lines over ``x in [0, width]``, over ``height``.

    Both lines are affine in ``x`` so the maximum is reached at an end point.
    """
    gt, est = as_vec3(gt), as_vec3(est)
    for l in (gt, est):
        if abs(l[1]) <= 1e-12 * math.hypot(l[0], l[1]) or l[1] == 0:
            raise VerticalLine("line has no finite height across the image")
    return max(abs(_height_at(gt, x) - _height_at(est, x)) for x in (0.0, float(width))) / height


@dataclass(frozen=True)
class AucCurve:
    thresholds: np.ndarray  # sorted errors clipped to tau
    fractions: np.ndarray  # fraction of images with error <= threshold
    auc: float
    tau: float

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["threshold", "fraction"])
            w.writerow([0.0, float(np.mean(self.thresholds <= 0.0))])
            for t, fr in zip(self.thresholds, self.fractions):
                w.writerow([float(t), float(fr)])
            w.writerow([self.tau, float(self.fractions[-1]) if len(self.fractions) else 0.0])


def auc(errors: Iterable[float], tau: float = DEFAULT_TAU) -> AucCurve:
    """Exact area under the empirical error CDF on ``[0, tau]``, divided by ``tau``.

    The area equals the mean of ``1 - min(e, tau) / tau``, so no binning of
    the curve is needed.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    e = np.asarray(list(errors), dtype=float)
    if e.size == 0:
        raise EmptyInput("no errors to evaluate")
    if np.any(e < 0) or np.any(np.isnan(e)):
        raise ValueError("errors must be nonnegative numbers")
    clipped = np.sort(np.minimum(e, tau))
    area = float(np.mean(1.0 - clipped / tau))
    fractions = np.arange(1, e.size + 1) / e.size
    saturated = np.sort(e) >= tau
    # images at or beyond the cutoff never count as below it
    fractions = np.where(saturated, np.count_nonzero(~saturated) / e.size, fractions)
    return AucCurve(thresholds=clipped, fractions=fractions, auc=area, tau=tau)


def parameter_errors(gt_f, gt_tilt, gt_roll, est_f, est_tilt, est_roll, width) -> tuple[float, float, float]:
    """Absolute field-of-view, tilt and roll errors in degrees."""
    dfov = abs(focal_to_fov(gt_f, width) - focal_to_fov(est_f, width))
    return math.degrees(dfov), math.degrees(abs(gt_tilt - est_tilt)), math.degrees(abs(gt_roll - est_roll))


@dataclass
class RunningCameraEstimate:
    """Running means of per-frame focal length, tilt and roll.

    Parameters are averaged, not homographies.  When ``true_f`` is known each
    update appends the relative focal error of the current mean to ``trace``.
    """

    true_f: float | None = None
    n: int = 0
    f: float = 0.0
    tilt: float = 0.0
    roll: float = 0.0
    trace: list = field(default_factory=list)

    def update(self, f: float, tilt: float, roll: float) -> "RunningCameraEstimate":
        # incremental form: a constant stream reproduces the constant exactly
        self.n += 1
        self.f += (f - self.f) / self.n
        self.tilt += (tilt - self.tilt) / self.n
        self.roll += (roll - self.roll) / self.n
        if self.true_f is not None:
            self.trace.append(abs(self.f - self.true_f) / self.true_f)
        return self


def video_average(frames: Iterable, true_f: float | None = None) -> RunningCameraEstimate:
    """Average per-frame ``(f, tilt, roll)`` estimates of one video stream."""
    est = RunningCameraEstimate(true_f=true_f)
    for f, tilt, roll in frames:
        est.update(f, tilt, roll)
    if est.n == 0:
        raise EmptyInput("video stream has no frames")
    return est


def format_report(summary: dict) -> str:
    """Plain-text table for an evaluation summary."""
    rows = [("images", f"{summary['n']}"), ("tau", f"{summary['tau']:.3f}"), ("horizon AUC", f"{100 * summary['auc']:.2f}%")]
    for key, label in (("fov_err_deg", "field of view"), ("tilt_err_deg", "tilt"), ("roll_err_deg", "roll")):
        if summary.get(key) is not None:
            rows.append((f"mean {label} error", f"{summary[key]:.4f} deg"))
    if summary.get("failed"):
        rows.append(("geometry failures", f"{summary['failed']}"))
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)

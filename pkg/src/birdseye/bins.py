"""Regression-by-classification: scalars in ``[-r, r]`` <-> discretisation bins.

Targets are hard one-hot bins.  Decoding takes the ``c`` most probable bins
and returns the probability-weighted mean of their centres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AllZero

DEFAULT_BINS = 500
DEFAULT_TOP_C = 11


@dataclass(frozen=True)
class BinSpec:
    b: int = DEFAULT_BINS
    r: float = 1.0

    def __post_init__(self):
        if self.b < 2:
            raise ValueError("need at least two bins")
        if not self.r > 0:
            raise ValueError("domain half-width must be positive")

    @property
    def width(self) -> float:
        return 2.0 * self.r / self.b

    @property
    def centres(self) -> np.ndarray:
        return -self.r + (np.arange(self.b) + 0.5) * self.width


def encode_scalar(v: float, spec: BinSpec = BinSpec()) -> int:
    """Bin index of ``v``; values outside ``[-r, r]`` go to the end bins."""
    i = math.floor((float(v) + spec.r) * spec.b / (2.0 * spec.r))
    return min(spec.b - 1, max(0, i))


def encode_scalars(values, spec: BinSpec = BinSpec()) -> tuple[np.ndarray, int]:
    """Vectorised :func:`encode_scalar`; also returns how many values were clamped."""
    v = np.asarray(values, dtype=float)
    clamped = int(np.count_nonzero((v < -spec.r) | (v > spec.r)))
    idx = np.floor((v + spec.r) * spec.b / (2.0 * spec.r)).astype(np.int64)
    return np.clip(idx, 0, spec.b - 1), clamped


def one_hot(index: int, spec: BinSpec = BinSpec()) -> np.ndarray:
    p = np.zeros(spec.b)
    p[index] = 1.0
    return p


def decode_topc(p, c: int = DEFAULT_TOP_C, spec: BinSpec = BinSpec()) -> float:
    """Weighted mean of the ``c`` most probable bin centres (ties -> lower index)."""
    p = np.asarray(p, dtype=float)
    if p.shape != (spec.b,):
        raise ValueError(f"expected {spec.b} probabilities, got shape {p.shape}")
    if not 1 <= c <= spec.b:
        raise ValueError(f"c must lie in [1, {spec.b}]")
    if np.any(p < 0):
        raise ValueError("probabilities must be nonnegative")
    top = np.argsort(-p, kind="stable")[:c]
    mass = p[top].sum()
    if mass == 0:
        raise AllZero("selected bins carry no probability mass")
    return float(p[top] @ spec.centres[top] / mass)


def normalize(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    s = p.sum()
    if s <= 0:
        raise AllZero("probability vector sums to zero")
    return p / s

"""Vector normalization, distances, and summary statistics.

Vectors may arrive as float32 (the storage precision of the vector file);
every reduction here accumulates in float64 so results do not depend on
storage precision or summation tricks.
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal

import numpy as np

from .errors import DegenerateVectorError, DimensionError, InsufficientDataError

_NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    sd: float
    var: float
    n: int


def normalize(v: np.ndarray) -> np.ndarray:
    """Scale v to unit L2 norm; returns float64."""
    v = np.asarray(v, dtype=np.float64)
    norm = float(np.sqrt(np.sum(v * v)))
    if norm <= _NORM_FLOOR:
        raise DegenerateVectorError(f"norm {norm} too small to normalize")
    return v / norm


def euclidean(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    d = a - b
    return float(np.sqrt(np.sum(d * d)))


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    na = float(np.sqrt(np.sum(a * a)))
    nb = float(np.sqrt(np.sum(b * b)))
    if na <= _NORM_FLOOR or nb <= _NORM_FLOOR:
        raise DegenerateVectorError("cosine undefined for near-zero vector")
    return float(np.dot(a, b) / (na * nb))


def summary_stats(values) -> SummaryStats:
    """Mean plus sample (n-1 denominator) standard deviation and variance."""
    arr = np.asarray(list(values), dtype=np.float64)
    n = arr.size
    if n < 2:
        raise InsufficientDataError(f"need at least 2 values, got {n}")
    mean = float(arr.mean())
    sd = float(arr.std(ddof=1))
    return SummaryStats(mean=mean, sd=sd, var=sd * sd, n=n)


def round_half_even(x: float, places: int = 2) -> float:
    """Table-output rounding: decimal round-half-to-even at `places` digits."""
    q = Decimal(1).scaleb(-places)
    return float(Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_EVEN))

"""2-D projection of embedded points onto their top principal components.

The two leading eigenpairs of the covariance matrix are found by block
power iteration with Rayleigh-Ritz refinement (no dense eigensolver), so
tests can check the result against an independent full eigendecomposition.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import EmbeddedPoint, Key
from .errors import InsufficientDataError

_RESIDUAL_TOL = 1e-10
_MAX_ITERATIONS = 100_000


@dataclass
class Projection2D:
    keys: list[Key]
    coords: np.ndarray  # (n, 2)
    components: np.ndarray  # (2, dim), orthonormal rows (second may be zero)
    variance_fractions: tuple[float, float]


def _top2_eigenpairs(cov: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Leading two eigenpairs of a symmetric PSD matrix by block power iteration."""
    dim = cov.shape[0]
    diag = np.diag(cov)
    total = float(diag.sum())
    scale = max(total, 1.0)
    # deterministic start: coordinate axes with the largest variance
    top = np.argsort(diag)[::-1]
    q = np.zeros((dim, 2))
    q[top[0], 0] = 1.0
    q[top[1] if dim > 1 else top[0], 1] = 1.0
    vals = np.zeros(2)
    for _ in range(_MAX_ITERATIONS):
        z = cov @ q
        q, _ = np.linalg.qr(z)
        small = q.T @ cov @ q
        # closed-form 2x2 symmetric eigendecomposition
        a, b, c = small[0, 0], small[0, 1], small[1, 1]
        tr, det = a + c, a * c - b * b
        disc = np.sqrt(max(tr * tr / 4.0 - det, 0.0))
        l1, l2 = tr / 2.0 + disc, tr / 2.0 - disc
        if abs(b) > 1e-300:
            v1 = np.array([b, l1 - a])
        else:
            v1 = np.array([1.0, 0.0]) if a >= c else np.array([0.0, 1.0])
        v1 /= np.linalg.norm(v1)
        v2 = np.array([-v1[1], v1[0]])
        rot = np.column_stack([v1, v2])
        q = q @ rot
        vals = np.array([l1, l2])
        resid = cov @ q - q * vals
        if np.max(np.sqrt(np.sum(resid * resid, axis=0))) <= _RESIDUAL_TOL * scale:
            break
    return vals, q.T


def pca_2d(points: Sequence[EmbeddedPoint]) -> Projection2D:
    """Project mean-centered points onto their top two principal directions.

    Sign convention: each component's largest-magnitude entry is positive.
    Rank-deficient input degrades gracefully: missing components come back
    as zero vectors with zero variance fraction.
    """
    if len(points) < 3:
        raise InsufficientDataError(f"need at least 3 points, got {len(points)}")
    x = np.array([p.vector for p in points], dtype=np.float64)
    n, dim = x.shape
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    total = float(np.trace(cov))
    if total <= 1e-18:
        components = np.zeros((2, dim))
        coords = np.zeros((n, 2))
        return Projection2D([p.key for p in points], coords, components, (0.0, 0.0))

    vals, vecs = _top2_eigenpairs(cov)
    components = np.zeros((2, dim))
    fractions = [0.0, 0.0]
    for i in range(2):
        if vals[i] <= 1e-12 * total:
            continue  # rank < i+1: leave as zeros
        v = vecs[i]
        j = int(np.argmax(np.abs(v)))
        if v[j] < 0:
            v = -v
        components[i] = v
        fractions[i] = float(vals[i] / total)
    coords = centered @ components.T
    return Projection2D(
        [p.key for p in points], coords, components, (fractions[0], fractions[1])
    )


def export_plot_data(proj: Projection2D, path) -> None:
    """Tab-separated (key, series, x, y) rows for any external plotter."""
    if not proj.keys:
        raise InsufficientDataError("empty projection")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("key\tseries\tx\ty\n")
        for (pid, ctype), (x, y) in zip(proj.keys, proj.coords):
            fh.write(f"{pid}\t{ctype}\t{float(x)!r}\t{float(y)!r}\n")

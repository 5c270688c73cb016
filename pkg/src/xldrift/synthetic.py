"""Synthetic corpus generators used by tests and benchmark runs.

The paired generator builds a corpus in the regime of the real data:
projects concentrated around a shared direction, each project's second
representation an angular perturbation of its first, plus a larger pool of
native-English points drawn from the same concentrated cloud.  The
perturbation and spread parameters are calibrated so the expected
within-pair distance (~0.6) sits below the expected distance to nearest
pool points (~0.75), after unit normalization.
"""
from __future__ import annotations

import numpy as np

from .corpus import (
    Corpus,
    CoordinateType,
    DIMENSION,
    KAKENHI,
    NIH,
    NSF,
    UKRI,
    ProjectRecord,
)

# spread of the shared cloud: E[pairwise distance] ~ sqrt(2*t^2/(1+t^2)) ~ 0.75
CLOUD_SPREAD = 0.6256
# total angular perturbation between the two sides of a pair, split evenly
# across both sides: E[pair distance] ~ sqrt(2*s^2/(2+s^2)) ~ 0.6
PAIR_SIGMA = 0.6626

_POOL_AGENCIES = (NIH, NSF, UKRI)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def make_paired_corpus(
    seed: int,
    n_pairs: int = 1000,
    n_pool: int = 5000,
    pair: tuple[CoordinateType, CoordinateType] = (
        CoordinateType.NATIVE_JA,
        CoordinateType.MT_EN,
    ),
    pair_sigma: float = PAIR_SIGMA,
    cloud_spread: float = CLOUD_SPREAD,
) -> Corpus:
    """Paired KAKENHI projects plus a native-English pool, all on the unit sphere."""
    rng = np.random.default_rng(seed)
    anchor = _unit(rng.standard_normal(DIMENSION))
    corpus = Corpus()
    left, right = pair

    def cloud_point() -> np.ndarray:
        return _unit(anchor + cloud_spread * _unit(rng.standard_normal(DIMENSION)))

    side_sigma = pair_sigma / np.sqrt(2.0)
    for i in range(n_pairs):
        pid = f"pair{i:06d}"
        latent = cloud_point()
        base = _unit(latent + side_sigma * _unit(rng.standard_normal(DIMENSION)))
        perturbed = _unit(latent + side_sigma * _unit(rng.standard_normal(DIMENSION)))
        for side, vec in ((left, base), (right, perturbed)):
            corpus.add_record(
                ProjectRecord(
                    id=pid,
                    agency=KAKENHI,
                    coordinate_type=side,
                    title=f"paired project {i}",
                    abstract=f"synthetic abstract {i}",
                )
            )
            corpus.attach_vector((pid, side.value), vec.astype(np.float32))

    for i in range(n_pool):
        pid = f"pool{i:06d}"
        agency = _POOL_AGENCIES[i % len(_POOL_AGENCIES)]
        corpus.add_record(
            ProjectRecord(
                id=pid,
                agency=agency,
                coordinate_type=CoordinateType.NATIVE_EN,
                title=f"pool project {i}",
                abstract=f"synthetic abstract {i}",
            )
        )
        corpus.attach_vector(
            (pid, CoordinateType.NATIVE_EN.value), cloud_point().astype(np.float32)
        )
    return corpus


def random_unit_vectors(seed: int, count: int, dim: int = DIMENSION) -> np.ndarray:
    """Uniform points on the unit sphere, float64, one per row."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((count, dim))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def embedding_like_unit_vectors(
    seed: int, count: int, intrinsic_dim: int = 16, dim: int = DIMENSION
) -> np.ndarray:
    """Unit vectors confined to a random low-dimensional subspace.

    Sentence-embedding clouds have low intrinsic dimensionality, which is
    what makes graph-based neighbor search effective; uniform points on the
    full 384-sphere have no such structure (all pairs are nearly
    equidistant) and are a degenerate benchmark for any index.  This
    generator mimics the structured case: Gaussian coefficients over a
    seeded orthonormal basis of `intrinsic_dim` directions, normalized.
    """
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.standard_normal((dim, intrinsic_dim)))
    x = rng.standard_normal((count, intrinsic_dim)) @ basis.T
    return x / np.linalg.norm(x, axis=1, keepdims=True)

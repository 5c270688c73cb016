"""Sampling, paired distances, baseline distances, neighborhood overlap.

This is the evaluation protocol: sample paired project ids, measure the
within-pair distance and each side's mean distance to its nearest
native-English pool projects, and count how many of the top-k pool
neighbors the two sides share.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass

import numpy as np

from . import knn
from .corpus import (
    Agency,
    Corpus,
    CoordinateType,
    KAKENHI,
    NIH,
    NSF,
    UKRI,
    filter_complete_pairs,
)
from .errors import (
    DistanceRangeError,
    InsufficientPoolError,
    InsufficientPopulationError,
    MissingRepresentationError,
)
from .metrics import SummaryStats, euclidean, normalize, round_half_even, summary_stats

DEFAULT_POOL = frozenset({NIH, NSF, UKRI})
DEFAULT_K = 10
DEFAULT_SAMPLE_SIZE = 1000


@dataclass(frozen=True)
class SampleSpec:
    seed: int
    n: int
    pair: tuple[CoordinateType, CoordinateType]
    agency: Agency = KAKENHI


@dataclass
class DistanceReport:
    rows: list[tuple[str, SummaryStats]]
    n: int
    k: int
    pool: tuple[str, ...]
    seed: int
    pair: tuple[str, str]


@dataclass
class OverlapReport:
    counts: list[tuple[str, int]]  # (id, overlap), id-sorted
    average: float
    k: int
    n: int
    pool: tuple[str, ...]
    seed: int
    pair: tuple[str, str]


@dataclass
class Histogram:
    edges: np.ndarray  # bins + 1 values, uniform over [0, 2]
    counts: np.ndarray
    label: str = ""


def sample_ids(corpus: Corpus, spec: SampleSpec) -> list[str]:
    """Uniform sample without replacement from the eligible paired ids.

    Eligibility comes from filter_complete_pairs restricted to the spec's
    agency.  The sample is a partial Fisher-Yates shuffle of the
    ascending-sorted eligible list driven by Python's Mersenne Twister
    seeded with spec.seed, so the same spec reproduces the same ids on any
    platform.
    """
    left, right = spec.pair
    eligible = [
        pid
        for pid in filter_complete_pairs(corpus, left, right)
        if corpus.records[(pid, left.value)].agency == spec.agency
    ]
    if len(eligible) < spec.n:
        raise InsufficientPopulationError(
            f"eligible population {len(eligible)} < sample size {spec.n}"
        )
    rng = random.Random(spec.seed)
    pool = list(eligible)
    for i in range(spec.n):
        j = rng.randrange(i, len(pool))
        pool[i], pool[j] = pool[j], pool[i]
    return pool[: spec.n]


def pair_distance(
    corpus: Corpus, pid: str, pair: tuple[CoordinateType, CoordinateType]
) -> float:
    """Distance between the two unit-normalized representations of one project."""
    vecs = []
    for side in pair:
        key = (pid, side.value)
        if key not in corpus.vectors:
            raise MissingRepresentationError(key)
        vecs.append(normalize(corpus.vectors[key]))
    return euclidean(vecs[0], vecs[1])


def _pool_filter(pool: frozenset[str] | set[str]) -> knn.Filter:
    native_en = CoordinateType.NATIVE_EN.value

    def flt(agency: str, ctype: str, key) -> bool:
        return ctype == native_en and agency in pool

    return flt


def _query(index, q, k, flt, params):
    if isinstance(index, knn.GraphIndex):
        return knn.query_graph(index, q, k, params, flt)
    return knn.query_exact(index, q, k, flt)


def baseline_distance(
    corpus: Corpus,
    pid: str,
    side: CoordinateType,
    pool: frozenset[str] | set[str],
    k: int,
    index,
    params: knn.SearchParams = knn.SearchParams(),
) -> float:
    """Mean distance from one representation to its k nearest pool projects."""
    key = (pid, side.value)
    if key not in corpus.vectors:
        raise MissingRepresentationError(key)
    flt = _pool_filter(pool)
    if index.count_matching(flt) < k:
        raise InsufficientPoolError(
            f"pool holds {index.count_matching(flt)} points, need {k}"
        )
    q = normalize(corpus.vectors[key])
    neighbors = _query(index, q, k, flt, params)
    if len(neighbors) < k:
        raise InsufficientPoolError(
            f"retrieved only {len(neighbors)} of {k} pool neighbors"
        )
    return float(np.mean([d for _, d in neighbors]))


def _topk_per_id(
    corpus: Corpus,
    ids: list[str],
    side: CoordinateType,
    pool,
    k: int,
    index,
    params: knn.SearchParams,
) -> list[knn.NeighborList]:
    """Top-k pool neighbors for each id's `side` vector, in id order.

    Exact indexes take the batched full-scan path; results match per-id
    query_exact calls.
    """
    flt = _pool_filter(pool)
    if index.count_matching(flt) < k:
        raise InsufficientPoolError(
            f"pool holds {index.count_matching(flt)} points, need {k}"
        )
    queries = []
    for pid in ids:
        key = (pid, side.value)
        if key not in corpus.vectors:
            raise MissingRepresentationError(key)
        queries.append(normalize(corpus.vectors[key]))
    if isinstance(index, knn.GraphIndex):
        results = [knn.query_graph(index, q, k, params, flt) for q in queries]
    else:
        results = knn.query_exact_batch(index, np.array(queries), k, flt)
    for pid, neighbors in zip(ids, results):
        if len(neighbors) < k:
            raise InsufficientPoolError(
                f"retrieved only {len(neighbors)} of {k} pool neighbors for {pid!r}"
            )
    return results


def distance_table(
    corpus: Corpus,
    spec: SampleSpec,
    pool: frozenset[str] | set[str] = DEFAULT_POOL,
    k: int = DEFAULT_K,
    index=None,
    params: knn.SearchParams = knn.SearchParams(),
) -> DistanceReport:
    """Three-row distance summary: within-pair, then each side vs the pool.

    All rows use the same sampled ids; per-id values are aggregated in
    ascending-id order so the result never depends on evaluation order.
    """
    left, right = spec.pair
    ids = sorted(sample_ids(corpus, spec))
    pair_vals = [pair_distance(corpus, pid, spec.pair) for pid in ids]
    left_vals = [
        float(np.mean([d for _, d in nl]))
        for nl in _topk_per_id(corpus, ids, left, pool, k, index, params)
    ]
    right_vals = [
        float(np.mean([d for _, d in nl]))
        for nl in _topk_per_id(corpus, ids, right, pool, k, index, params)
    ]
    rows = [
        (
            f"between {left.display_name} and {right.display_name} (same project)",
            summary_stats(pair_vals),
        ),
        (f"between {left.display_name} and native English", summary_stats(left_vals)),
        (f"between {right.display_name} and native English", summary_stats(right_vals)),
    ]
    return DistanceReport(
        rows=rows,
        n=spec.n,
        k=k,
        pool=tuple(sorted(pool)),
        seed=spec.seed,
        pair=(left.value, right.value),
    )


def neighborhood_overlap(
    corpus: Corpus,
    pid: str,
    pair: tuple[CoordinateType, CoordinateType],
    pool: frozenset[str] | set[str],
    k: int,
    index,
    params: knn.SearchParams = knn.SearchParams(),
) -> int:
    """How many of the top-k pool neighbors the two representations share.

    Overlap is counted on project ids, so duplicate vectors in the pool
    cannot inflate it.
    """
    flt = _pool_filter(pool)
    if index.count_matching(flt) < k:
        raise InsufficientPoolError(
            f"pool holds {index.count_matching(flt)} points, need {k}"
        )
    sides = []
    for side in pair:
        key = (pid, side.value)
        if key not in corpus.vectors:
            raise MissingRepresentationError(key)
        q = normalize(corpus.vectors[key])
        neighbors = _query(index, q, k, flt, params)
        sides.append({nkey[0] for nkey, _ in neighbors})
    return len(sides[0] & sides[1])


def overlap_table(
    corpus: Corpus,
    spec: SampleSpec,
    pool: frozenset[str] | set[str] = DEFAULT_POOL,
    k: int = DEFAULT_K,
    index=None,
    params: knn.SearchParams = knn.SearchParams(),
) -> OverlapReport:
    ids = sorted(sample_ids(corpus, spec))
    left_sets = [
        {nkey[0] for nkey, _ in nl}
        for nl in _topk_per_id(corpus, ids, spec.pair[0], pool, k, index, params)
    ]
    right_sets = [
        {nkey[0] for nkey, _ in nl}
        for nl in _topk_per_id(corpus, ids, spec.pair[1], pool, k, index, params)
    ]
    counts = [
        (pid, len(ls & rs)) for pid, ls, rs in zip(ids, left_sets, right_sets)
    ]
    average = float(np.mean([c for _, c in counts]))
    return OverlapReport(
        counts=counts,
        average=average,
        k=k,
        n=spec.n,
        pool=tuple(sorted(pool)),
        seed=spec.seed,
        pair=(spec.pair[0].value, spec.pair[1].value),
    )


def distance_histogram(values, bins: int, label: str = "") -> Histogram:
    """Uniform histogram over [0, 2]; bins are right-open, last bin closed."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    values = np.asarray(list(values), dtype=np.float64)
    if values.size and (values.min() < 0.0 or values.max() > 2.0 + 1e-9):
        raise DistanceRangeError(
            "unit-vector distances must lie in [0, 2]"
        )
    edges = np.linspace(0.0, 2.0, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    width = 2.0 / bins
    for v in values:
        idx = min(int(v / width), bins - 1)
        counts[idx] += 1
    return Histogram(edges=edges, counts=counts, label=label)


# --- report serialization ---------------------------------------------------


def distance_report_to_jsonl(report: DistanceReport) -> str:
    lines = []
    for label, stats in report.rows:
        lines.append(
            json.dumps(
                {
                    "label": label,
                    "mean": stats.mean,
                    "sd": stats.sd,
                    "var": stats.var,
                    "n": stats.n,
                    "k": report.k,
                    "pool": list(report.pool),
                    "seed": report.seed,
                    "pair": list(report.pair),
                },
                sort_keys=True,
            )
        )
    return "\n".join(lines) + "\n"


def render_distance_table(report: DistanceReport) -> str:
    """Aligned plain-text table, values rounded half-to-even at 2 decimals."""
    header = ("Item", "Distance (Avg.)", "SD (s)", "Var (s^2)")
    body = [
        (
            label,
            f"{round_half_even(st.mean, 2):.2f}",
            f"{round_half_even(st.sd, 2):.2f}",
            f"{round_half_even(st.var, 2):.2f}",
        )
        for label, st in report.rows
    ]
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(4)]
    lines = []
    for row in [header, *body]:
        cells = [row[0].ljust(widths[0])] + [
            row[i].rjust(widths[i]) for i in range(1, 4)
        ]
        lines.append("  ".join(cells).rstrip())
    lines.append(f"(n={report.n}, random sampling, seed={report.seed})")
    return "\n".join(lines) + "\n"


def overlap_report_to_jsonl(report: OverlapReport) -> str:
    lines = [
        json.dumps(
            {
                "average": report.average,
                "k": report.k,
                "n": report.n,
                "pool": list(report.pool),
                "seed": report.seed,
                "pair": list(report.pair),
            },
            sort_keys=True,
        )
    ]
    for pid, count in report.counts:
        lines.append(json.dumps({"id": pid, "overlap": count}, sort_keys=True))
    return "\n".join(lines) + "\n"


def render_overlap_table(report: OverlapReport) -> str:
    left, right = report.pair
    label = f"between {left} and {right}"
    avg = f"{round_half_even(report.average, 1):.1f}"
    header = ("Item", f"Average overlap (k={report.k})")
    width = max(len(header[0]), len(label))
    lines = [
        "  ".join([header[0].ljust(width), header[1]]).rstrip(),
        "  ".join([label.ljust(width), avg.rjust(len(header[1]))]).rstrip(),
        f"(n={report.n}, random sampling, seed={report.seed})",
    ]
    return "\n".join(lines) + "\n"


def histogram_to_text(hist: Histogram) -> str:
    """Two columns (bin_left, count) for external plotting."""
    lines = [f"{hist.edges[i]:.6f}\t{int(hist.counts[i])}" for i in range(len(hist.counts))]
    return "\n".join(lines) + "\n"

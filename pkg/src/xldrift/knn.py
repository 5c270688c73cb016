"""Exact brute-force k-NN and a graph-based approximate index.

The exact index is the oracle: a full scan with a fixed tie rule
(ascending distance, then ascending key).  The graph index links every
point to its nearest neighbors and answers queries by greedy best-first
expansion from randomly seeded entry points; its quality is measured as
recall against the oracle rather than guaranteed.
"""
from __future__ import annotations

import hashlib
import heapq
import random
import struct
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .corpus import Corpus, EmbeddedPoint, Key
from .errors import (
    DimensionError,
    EmptyIndexError,
    InsufficientGroundTruthError,
    OrphanVectorError,
    UnderfullGraphError,
    VectorFormatError,
)

Neighbor = tuple[Key, float]
NeighborList = list[Neighbor]
# filter(agency, coordinate_type_value, key) -> keep?
Filter = Callable[[str, str, Key], bool]

DEFAULT_DEGREE = 16


@dataclass(frozen=True)
class SearchParams:
    pool_size: int = 64
    entry_count: int = 4
    max_evaluations: int = 4096


class _PointSet:
    """Shared storage: keys, float64 matrix, and per-point metadata."""

    def __init__(self, points: Sequence[EmbeddedPoint]):
        dims = {p.vector.shape for p in points}
        if len(dims) > 1:
            raise DimensionError(f"mixed vector shapes {sorted(dims)}")
        self.keys: list[Key] = [p.key for p in points]
        self.mat64 = np.array([p.vector for p in points], dtype=np.float64)
        self.agencies: list[str] = [p.agency for p in points]
        self.ctypes: list[str] = [p.coordinate_type.value for p in points]
        # rank of each point in ascending-key order, for tie-breaking
        order = sorted(range(len(self.keys)), key=lambda i: self.keys[i])
        self.keyrank = np.empty(len(order), dtype=np.int64)
        for rank, idx in enumerate(order):
            self.keyrank[idx] = rank

    def __len__(self) -> int:
        return len(self.keys)

    def passes(self, idx: int, flt: Filter | None) -> bool:
        return flt is None or bool(flt(self.agencies[idx], self.ctypes[idx], self.keys[idx]))

    def count_matching(self, flt: Filter | None) -> int:
        if flt is None:
            return len(self.keys)
        return sum(
            1
            for i in range(len(self.keys))
            if flt(self.agencies[i], self.ctypes[i], self.keys[i])
        )

    def distances_to(self, q: np.ndarray, idxs=None) -> np.ndarray:
        q = np.asarray(q, dtype=np.float64)
        rows = self.mat64 if idxs is None else self.mat64[idxs]
        diff = rows - q
        return np.sqrt(np.sum(diff * diff, axis=1))


class ExactIndex(_PointSet):
    pass


def build_exact(points: Sequence[EmbeddedPoint]) -> ExactIndex:
    if not points:
        raise EmptyIndexError("cannot index zero points")
    return ExactIndex(points)


def _select_k(dists: np.ndarray, idxs: np.ndarray, k: int, index: _PointSet) -> NeighborList:
    """Smallest-k by (distance, key) over candidate positions `idxs`."""
    if len(idxs) > k:
        # keep everything tied with the k-th distance so the key rule decides
        kth = np.partition(dists, k - 1)[k - 1]
        keep = dists <= kth
        dists, idxs = dists[keep], idxs[keep]
    order = sorted(range(len(idxs)), key=lambda j: (dists[j], index.keys[idxs[j]]))
    return [(index.keys[idxs[j]], float(dists[j])) for j in order[:k]]


def query_exact(index: ExactIndex, q: np.ndarray, k: int, flt: Filter | None = None) -> NeighborList:
    """Full scan: the k nearest points passing the filter, tie-broken by key."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if flt is None:
        idxs = np.arange(len(index))
    else:
        idxs = np.array(
            [i for i in range(len(index)) if index.passes(i, flt)], dtype=np.int64
        )
    if len(idxs) == 0:
        return []
    dists = index.distances_to(q, idxs)
    return _select_k(dists, idxs, k, index)


def query_exact_batch(
    index: ExactIndex, queries: np.ndarray, k: int, flt: Filter | None = None
) -> list[NeighborList]:
    """query_exact for many queries at once.

    Candidates are screened with one gram-matrix pass, then re-scored with
    the same direct difference formula query_exact uses; the screening
    margin comfortably covers the two formulas' rounding gap, so each row
    equals query_exact(index, q, k, flt).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    queries = np.asarray(queries, dtype=np.float64)
    if flt is None:
        idxs = np.arange(len(index))
    else:
        idxs = np.array(
            [i for i in range(len(index)) if index.passes(i, flt)], dtype=np.int64
        )
    if len(idxs) == 0:
        return [[] for _ in range(len(queries))]
    mat = index.mat64[idxs]
    sq = np.sum(mat * mat, axis=1)
    qsq = np.sum(queries * queries, axis=1)
    d2 = np.maximum(qsq[:, None] + sq[None, :] - 2.0 * (queries @ mat.T), 0.0)
    results = []
    for row in range(len(queries)):
        d2row = d2[row]
        if len(idxs) > k:
            kth = np.partition(d2row, k - 1)[k - 1]
            cand = np.nonzero(d2row <= kth + 1e-9)[0]
        else:
            cand = np.arange(len(idxs))
        cand_idxs = idxs[cand]
        dists = index.distances_to(queries[row], cand_idxs)
        results.append(_select_k(dists, cand_idxs, k, index))
    return results


class GraphIndex(_PointSet):
    def __init__(self, points, adjacency: np.ndarray, degree: int, build_seed: int):
        super().__init__(points)
        self.adjacency = adjacency
        self.degree = degree
        self.build_seed = build_seed
        # traversal uses the graph undirected: out-edges plus reverse edges.
        # A pure nearest-neighbor digraph is poorly navigable around hub
        # points; the reverse edges restore paths into them.
        links: list[set[int]] = [set(map(int, row)) for row in adjacency]
        for i, row in enumerate(adjacency):
            for j in row:
                links[int(j)].add(i)
        self.traverse: list[np.ndarray] = [
            np.array(sorted(s), dtype=np.int64) for s in links
        ]


def build_graph(
    points: Sequence[EmbeddedPoint],
    degree: int = DEFAULT_DEGREE,
    build_seed: int = 0,
    chunk: int = 512,
) -> GraphIndex:
    """Link every point to its exact degree nearest neighbors.

    The all-pairs distances are computed in float64 chunks; adjacency rows
    are sorted ascending by distance (key rank breaks ties), so rebuilding
    from the same points is byte-identical regardless of chunk size.
    """
    if degree < 2:
        raise ValueError("degree must be >= 2")
    if len(points) <= degree:
        raise UnderfullGraphError(
            f"need more than {degree} points, got {len(points)}"
        )
    ps = _PointSet(points)
    n = len(ps)
    sq = np.sum(ps.mat64 * ps.mat64, axis=1)
    adjacency = np.empty((n, degree), dtype=np.uint32)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        gram = ps.mat64[start:stop] @ ps.mat64.T
        d2 = np.maximum(sq[start:stop, None] + sq[None, :] - 2.0 * gram, 0.0)
        for row in range(start, stop):
            d2row = d2[row - start].copy()
            d2row[row] = np.inf  # no self-loop
            kth = np.partition(d2row, degree - 1)[degree - 1]
            cand = np.nonzero(d2row <= kth)[0]
            cand = sorted(cand, key=lambda i: (d2row[i], ps.keyrank[i]))
            adjacency[row] = cand[:degree]
    return GraphIndex(points, adjacency, degree, build_seed)


def _entry_seed(q64: np.ndarray, build_seed: int) -> int:
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack("<q", build_seed))
    h.update(q64.tobytes())
    return int.from_bytes(h.digest(), "little")


def query_graph(
    index: GraphIndex,
    q: np.ndarray,
    k: int,
    params: SearchParams = SearchParams(),
    flt: Filter | None = None,
) -> NeighborList:
    """Greedy best-first search over the neighbor graph.

    Entry points come from an RNG seeded by (query bytes, build seed), so
    identical calls return identical results.  A pool of the best
    `pool_size` candidates seen (ignoring the filter) drives termination;
    filtered hits are collected separately so a selective filter cannot
    disconnect the traversal.  Results are approximate; measure recall
    with :func:`recall_at_k`.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if params.pool_size < k:
        raise ValueError(f"pool_size {params.pool_size} < k {k}")
    n = len(index)
    q64 = np.asarray(q, dtype=np.float64)
    rng = random.Random(_entry_seed(q64, index.build_seed))
    entries = sorted(rng.sample(range(n), min(params.entry_count, n)))

    visited = np.zeros(n, dtype=bool)
    visited[entries] = True
    entry_dists = index.distances_to(q64, np.array(entries, dtype=np.int64))

    candidates: list[tuple[float, int, int]] = []  # (dist, keyrank, idx)
    pool: list[tuple[float, int, int]] = []  # max-heap via negation
    hits: list[tuple[float, Key]] = []

    def admit(dist: float, idx: int) -> None:
        heapq.heappush(candidates, (dist, int(index.keyrank[idx]), idx))
        item = (-dist, -int(index.keyrank[idx]), idx)
        if len(pool) < params.pool_size:
            heapq.heappush(pool, item)
        elif item > pool[0]:
            heapq.heapreplace(pool, item)
        if index.passes(idx, flt):
            hits.append((dist, index.keys[idx]))

    for dist, idx in zip(entry_dists, entries):
        admit(float(dist), idx)

    evaluations = 0
    while candidates:
        dist, _, idx = heapq.heappop(candidates)
        if len(pool) >= params.pool_size and dist > -pool[0][0]:
            break  # pool is stable: no unexpanded candidate can improve it
        if evaluations >= params.max_evaluations:
            break
        neigh = [int(j) for j in index.traverse[idx] if not visited[j]]
        if not neigh:
            continue
        budget = params.max_evaluations - evaluations
        neigh = neigh[:budget]
        evaluations += len(neigh)
        visited[neigh] = True
        dists = index.distances_to(q64, np.array(neigh, dtype=np.int64))
        for d, j in zip(dists, neigh):
            admit(float(d), j)

    hits.sort(key=lambda t: (t[0], t[1]))
    return [(key, dist) for dist, key in hits[:k]]


def recall_at_k(approx: NeighborList, exact: NeighborList, k: int) -> float:
    if len(exact) < k:
        raise InsufficientGroundTruthError(
            f"ground truth has {len(exact)} entries, need {k}"
        )
    approx_keys = {key for key, _ in approx[:k]}
    exact_keys = {key for key, _ in exact[:k]}
    return len(approx_keys & exact_keys) / k


GRAPH_MAGIC = b"XLGI"
GRAPH_VERSION = 1
_GRAPH_HEADER = struct.Struct("<4sIIQq")  # magic, version, degree, count, build_seed


def save_graph(index: GraphIndex, path) -> None:
    """Serialize keys + adjacency; vectors stay in the corpus vector file."""
    with open(path, "wb") as fh:
        fh.write(
            _GRAPH_HEADER.pack(
                GRAPH_MAGIC, GRAPH_VERSION, index.degree, len(index), index.build_seed
            )
        )
        for pid, ctype in index.keys:
            key_bytes = f"{pid}\x00{ctype}".encode("utf-8")
            fh.write(struct.pack("<H", len(key_bytes)))
            fh.write(key_bytes)
        fh.write(np.ascontiguousarray(index.adjacency, dtype="<u4").tobytes())


def load_graph(path, corpus: Corpus) -> GraphIndex:
    """Rehydrate a graph index, pulling vectors and metadata from the corpus."""
    with open(path, "rb") as fh:
        header = fh.read(_GRAPH_HEADER.size)
        if len(header) != _GRAPH_HEADER.size:
            raise VectorFormatError(f"{path}: truncated header")
        magic, version, degree, count, build_seed = _GRAPH_HEADER.unpack(header)
        if magic != GRAPH_MAGIC:
            raise VectorFormatError(f"{path}: bad magic {magic!r}")
        if version != GRAPH_VERSION:
            raise VectorFormatError(f"{path}: unsupported version {version}")
        keys: list[Key] = []
        for _ in range(count):
            (key_len,) = struct.unpack("<H", fh.read(2))
            raw = fh.read(key_len).decode("utf-8")
            pid, ctype = raw.split("\x00", 1)
            keys.append((pid, ctype))
        adj_bytes = fh.read(4 * count * degree)
        if len(adj_bytes) != 4 * count * degree:
            raise VectorFormatError(f"{path}: truncated adjacency")
        adjacency = np.frombuffer(adj_bytes, dtype="<u4").reshape(count, degree).copy()
    points = []
    for key in keys:
        if key not in corpus.vectors:
            raise OrphanVectorError(key)
        record = corpus.records[key]
        points.append(
            EmbeddedPoint(
                id=record.id,
                coordinate_type=record.coordinate_type,
                vector=corpus.vectors[key],
                agency=record.agency,
            )
        )
    return GraphIndex(points, adjacency, degree, build_seed)

"""Project records, completeness filtering, and the record/vector file formats.

A corpus holds funded-project records keyed by (project id, coordinate type)
together with their embedding vectors.  Records travel as JSON Lines; vectors
travel in a small binary container (magic ``XLDV``) described in
:func:`write_vectors`.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np

from .errors import (
    DimensionError,
    DuplicateKeyError,
    OrphanVectorError,
    RecordParseError,
    VectorFormatError,
)

DIMENSION = 384

KAKENHI = "KAKENHI"
NIH = "NIH"
NSF = "NSF"
UKRI = "UKRI"
KNOWN_AGENCIES = (KAKENHI, NIH, NSF, UKRI)

# Agencies are open-ended strings; the four above are the canonical tags and
# anything else is accepted as an extension agency.
Agency = str


class CoordinateType(str, Enum):
    """Which linguistic representation of a project a vector encodes."""

    NATIVE_JA = "native_ja"
    MT_EN = "mt_en"
    AUTHOR_EN = "author_en"
    NATIVE_EN = "native_en"

    @property
    def display_name(self) -> str:
        return _DISPLAY_NAMES[self]


_DISPLAY_NAMES = {
    CoordinateType.NATIVE_JA: "native Japanese",
    CoordinateType.MT_EN: "MT English",
    CoordinateType.AUTHOR_EN: "author-written English",
    CoordinateType.NATIVE_EN: "native English",
}

# Only KAKENHI projects carry Japanese-side representations; native English
# is reserved for the English-language agencies.
_KAKENHI_TYPES = frozenset(
    {CoordinateType.NATIVE_JA, CoordinateType.MT_EN, CoordinateType.AUTHOR_EN}
)

Key = tuple[str, str]  # (project id, coordinate type value)


@dataclass(frozen=True)
class ProjectRecord:
    id: str
    agency: Agency
    coordinate_type: CoordinateType
    title: str
    abstract: str
    fiscal_year: int | None = None

    @property
    def key(self) -> Key:
        return (self.id, self.coordinate_type.value)

    @property
    def complete(self) -> bool:
        return bool(self.title) and bool(self.abstract)


@dataclass
class EmbeddedPoint:
    """A vector bound to its (project id, coordinate type) identity."""

    id: str
    coordinate_type: CoordinateType
    vector: np.ndarray
    agency: Agency = ""

    @property
    def key(self) -> Key:
        return (self.id, self.coordinate_type.value)


@dataclass
class Corpus:
    records: dict[Key, ProjectRecord] = field(default_factory=dict)
    vectors: dict[Key, np.ndarray] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def add_record(self, record: ProjectRecord) -> None:
        if record.key in self.records:
            raise DuplicateKeyError(record.key)
        self.records[record.key] = record

    def attach_vector(self, key: Key, vector: np.ndarray) -> None:
        if key not in self.records:
            raise OrphanVectorError(key)
        vector = np.asarray(vector, dtype=np.float32)
        if vector.shape != (DIMENSION,):
            raise DimensionError(
                f"vector for {key!r} has dimension {vector.shape}, expected {DIMENSION}"
            )
        self.vectors[key] = vector

    def agency_counts(self) -> dict[Agency, int]:
        counts: dict[Agency, int] = {}
        for record in self.records.values():
            counts[record.agency] = counts.get(record.agency, 0) + 1
        return counts

    def partition_by_agency(self) -> dict[Agency, "Corpus"]:
        parts: dict[Agency, Corpus] = {}
        for key, record in self.records.items():
            part = parts.setdefault(record.agency, Corpus())
            part.records[key] = record
            if key in self.vectors:
                part.vectors[key] = self.vectors[key]
        return parts

    def points(self, coordinate_types: Iterable[CoordinateType] | None = None) -> list[EmbeddedPoint]:
        """All embedded points, id-sorted, optionally restricted by coordinate type."""
        wanted = None if coordinate_types is None else {c.value for c in coordinate_types}
        out = []
        for key in sorted(self.vectors):
            record = self.records[key]
            if wanted is not None and record.coordinate_type.value not in wanted:
                continue
            out.append(
                EmbeddedPoint(
                    id=record.id,
                    coordinate_type=record.coordinate_type,
                    vector=self.vectors[key],
                    agency=record.agency,
                )
            )
        return out


def _parse_record(obj: dict, path, line_no: int) -> ProjectRecord:
    for field_name in ("id", "agency", "coordinate_type", "title", "abstract"):
        if field_name not in obj:
            raise RecordParseError(path, line_no, f"missing field {field_name!r}")
    try:
        ctype = CoordinateType(obj["coordinate_type"])
    except ValueError:
        raise RecordParseError(
            path, line_no, f"unknown coordinate_type {obj['coordinate_type']!r}"
        ) from None
    agency = str(obj["agency"])
    if not agency:
        raise RecordParseError(path, line_no, "empty agency tag")
    if agency == KAKENHI and ctype not in _KAKENHI_TYPES:
        raise RecordParseError(path, line_no, f"{ctype.value} not valid for KAKENHI")
    if agency != KAKENHI and ctype in _KAKENHI_TYPES:
        raise RecordParseError(path, line_no, f"{ctype.value} reserved for KAKENHI")
    fiscal_year = obj.get("fiscal_year")
    if fiscal_year is not None and not isinstance(fiscal_year, int):
        raise RecordParseError(path, line_no, "fiscal_year must be an integer")
    return ProjectRecord(
        id=str(obj["id"]),
        agency=agency,
        coordinate_type=ctype,
        title=str(obj["title"]),
        abstract=str(obj["abstract"]),
        fiscal_year=fiscal_year,
    )


def load_records(path, format: str = "jsonl") -> Corpus:
    """Load a JSON Lines record file into a fresh corpus."""
    if format != "jsonl":
        raise ValueError(f"unsupported record format {format!r}")
    corpus = Corpus()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordParseError(path, line_no, f"invalid JSON: {exc}") from None
            if not isinstance(obj, dict):
                raise RecordParseError(path, line_no, "line is not an object")
            corpus.add_record(_parse_record(obj, path, line_no))
    return corpus


def write_records(corpus: Corpus, path) -> None:
    """Write records as JSON Lines, key-sorted for reproducible files."""
    with open(path, "w", encoding="utf-8") as fh:
        for key in sorted(corpus.records):
            record = corpus.records[key]
            obj = {
                "id": record.id,
                "agency": record.agency,
                "coordinate_type": record.coordinate_type.value,
                "title": record.title,
                "abstract": record.abstract,
            }
            if record.fiscal_year is not None:
                obj["fiscal_year"] = record.fiscal_year
            fh.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")


VECTOR_MAGIC = b"XLDV"
VECTOR_VERSION = 1
_HEADER = struct.Struct("<4sIIQ")  # magic, version, dimension, count


def write_vector_file(path, entries: Iterable[tuple[Key, np.ndarray]], dimension: int = DIMENSION) -> None:
    """Write (key, vector) entries to the ``XLDV`` binary container.

    Layout (little-endian): magic ``XLDV``, u32 version, u32 dimension,
    u64 count, then per point a u16 key length, the UTF-8 key bytes
    ``id NUL coordinate_type``, and ``dimension`` float32 components.
    """
    entries = list(entries)
    for key, vec in entries:
        vec = np.asarray(vec)
        if vec.shape != (dimension,):
            raise DimensionError(
                f"vector for {key!r} has shape {vec.shape}, expected ({dimension},)"
            )
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(VECTOR_MAGIC, VECTOR_VERSION, dimension, len(entries)))
        for (pid, ctype), vec in entries:
            key_bytes = f"{pid}\x00{ctype}".encode("utf-8")
            fh.write(struct.pack("<H", len(key_bytes)))
            fh.write(key_bytes)
            fh.write(np.asarray(vec, dtype="<f4").tobytes())


def read_vector_file(path) -> tuple[int, list[tuple[Key, np.ndarray]]]:
    """Read an ``XLDV`` file; returns (dimension, [(key, float32 vector), ...])."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise VectorFormatError(f"{path}: truncated header")
        magic, version, dimension, count = _HEADER.unpack(header)
        if magic != VECTOR_MAGIC:
            raise VectorFormatError(f"{path}: bad magic {magic!r}")
        if version != VECTOR_VERSION:
            raise VectorFormatError(f"{path}: unsupported version {version}")
        entries: list[tuple[Key, np.ndarray]] = []
        for _ in range(count):
            len_bytes = fh.read(2)
            if len(len_bytes) != 2:
                raise VectorFormatError(f"{path}: truncated key length")
            (key_len,) = struct.unpack("<H", len_bytes)
            key_bytes = fh.read(key_len)
            if len(key_bytes) != key_len:
                raise VectorFormatError(f"{path}: truncated key")
            raw = key_bytes.decode("utf-8")
            if "\x00" not in raw:
                raise VectorFormatError(f"{path}: malformed key {raw!r}")
            pid, ctype = raw.split("\x00", 1)
            vec_bytes = fh.read(4 * dimension)
            if len(vec_bytes) != 4 * dimension:
                raise VectorFormatError(f"{path}: truncated vector for {pid!r}")
            vec = np.frombuffer(vec_bytes, dtype="<f4").copy()
            entries.append(((pid, ctype), vec))
    return dimension, entries


def load_vectors(corpus: Corpus, path) -> Corpus:
    """Attach vectors from an ``XLDV`` file to an already-loaded corpus."""
    dimension, entries = read_vector_file(path)
    if dimension != DIMENSION:
        raise DimensionError(f"{path}: dimension {dimension}, expected {DIMENSION}")
    for key, vec in entries:
        if key in corpus.vectors:
            raise DuplicateKeyError(key)
        corpus.attach_vector(key, vec)
    return corpus


def write_vectors(corpus: Corpus, path) -> None:
    """Persist all corpus vectors; round-trips bit-exactly through load_vectors."""
    entries = [(key, corpus.vectors[key]) for key in sorted(corpus.vectors)]
    write_vector_file(path, entries, DIMENSION)


def filter_complete_pairs(
    corpus: Corpus, left: CoordinateType, right: CoordinateType
) -> list[str]:
    """Ids having complete records plus vectors on both coordinate types.

    Mirrors pairwise deletion: a project participates in a comparison only
    when every field that comparison needs is present on both sides.
    """
    if left == right:
        raise ValueError("left and right coordinate types must differ")
    out = []
    left_ids = {pid for (pid, ct) in corpus.records if ct == left.value}
    for pid in left_ids:
        lkey, rkey = (pid, left.value), (pid, right.value)
        if rkey not in corpus.records:
            continue
        if not (corpus.records[lkey].complete and corpus.records[rkey].complete):
            continue
        if lkey in corpus.vectors and rkey in corpus.vectors:
            out.append(pid)
    out.sort()
    return out

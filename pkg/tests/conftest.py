import json

import numpy as np
import pytest

from xldrift.corpus import (
    Corpus,
    CoordinateType,
    DIMENSION,
    EmbeddedPoint,
    ProjectRecord,
)


def unit(v):
    v = np.asarray(v, dtype=np.float64)
    return v / np.linalg.norm(v)


def pad(*components):
    """Embed a short coordinate list into a 384-d vector."""
    v = np.zeros(DIMENSION)
    v[: len(components)] = components
    return v


def make_point(pid, vector, ctype=CoordinateType.NATIVE_EN, agency="NSF"):
    return EmbeddedPoint(
        id=pid,
        coordinate_type=ctype,
        vector=np.asarray(vector, dtype=np.float32),
        agency=agency,
    )


def add_project(corpus, pid, agency, ctype, vector=None, title="t", abstract="a"):
    corpus.add_record(
        ProjectRecord(
            id=pid, agency=agency, coordinate_type=ctype, title=title, abstract=abstract
        )
    )
    if vector is not None:
        corpus.attach_vector((pid, ctype.value), np.asarray(vector, dtype=np.float32))


def write_jsonl(path, objs):
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj) + "\n")


@pytest.fixture
def four_record_file(tmp_path):
    path = tmp_path / "records.jsonl"
    write_jsonl(
        path,
        [
            {"id": "k1", "agency": "KAKENHI", "coordinate_type": "native_ja",
             "title": "T1", "abstract": "A1"},
            {"id": "k1", "agency": "KAKENHI", "coordinate_type": "mt_en",
             "title": "T1e", "abstract": "A1e", "fiscal_year": 2020},
            {"id": "n1", "agency": "NSF", "coordinate_type": "native_en",
             "title": "T2", "abstract": "A2"},
            {"id": "h1", "agency": "NIH", "coordinate_type": "native_en",
             "title": "T3", "abstract": "A3"},
        ],
    )
    return path

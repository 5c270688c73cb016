import hashlib

import numpy as np
import pytest

from xldrift_embedder.records import RawRecord, write_records


def fake_encoder(texts):
    """Deterministic 384-d stand-in for the sentence-embedding model."""
    out = np.empty((len(texts), 384), dtype=np.float32)
    for i, text in enumerate(texts):
        digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "little"))
        out[i] = rng.standard_normal(384).astype(np.float32)
    return out


def make_record(pid, title="Title", abstract="Abstract", ctype="native_ja",
                agency="KAKENHI"):
    return RawRecord(id=pid, agency=agency, coordinate_type=ctype,
                     title=title, abstract=abstract)


@pytest.fixture
def record_file(tmp_path):
    def write(records, name="records.jsonl"):
        path = tmp_path / name
        write_records(path, records)
        return path
    return write

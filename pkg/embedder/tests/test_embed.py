import numpy as np
import pytest

from conftest import fake_encoder, make_record
from xldrift_embedder.embed import EmbedJob, embed_batch


def run_job(record_file, tmp_path, records, name="out.xldv", batch_size=64,
            encoder=fake_encoder):
    path = record_file(records)
    out = tmp_path / name
    job = EmbedJob(input_path=str(path), output_path=str(out),
                   batch_size=batch_size)
    count = embed_batch(job, encoder=encoder)
    return count, out


class TestEmbedBatch:
    def test_one_vector_per_complete_record(self, record_file, tmp_path):
        records = [
            make_record("a", "T1", "A1"),
            make_record("b", "T2", "A2"),
            make_record("c", "T3", "A3"),
            make_record("d", "T4", ""),  # incomplete
        ]
        count, out = run_job(record_file, tmp_path, records)
        assert count == 3
        assert out.exists()

    def test_same_text_identical_vectors(self, record_file, tmp_path):
        records = [
            make_record("a", "Same", "Text"),
            make_record("b", "Same", "Text"),
        ]
        _, out = run_job(record_file, tmp_path, records)
        from xldrift.corpus import read_vector_file
        _, pairs = read_vector_file(out)
        entries = dict(pairs)
        va = entries[("a", "native_ja")]
        vb = entries[("b", "native_ja")]
        assert va.tobytes() == vb.tobytes()

    def test_batch_boundaries_do_not_change_output(self, record_file, tmp_path):
        records = [make_record(f"r{i:03d}", f"T{i}", f"A{i}") for i in range(10)]
        _, out1 = run_job(record_file, tmp_path, records, name="b1.xldv",
                          batch_size=3)
        _, out2 = run_job(record_file, tmp_path, records, name="b2.xldv",
                          batch_size=64)
        assert out1.read_bytes() == out2.read_bytes()

    def test_wrong_dimension_aborts_before_writing(self, record_file, tmp_path):
        def bad_encoder(texts):
            return np.zeros((len(texts), 383), dtype=np.float32)

        records = [make_record("a", "T", "A")]
        path = record_file(records)
        out = tmp_path / "bad.xldv"
        job = EmbedJob(input_path=str(path), output_path=str(out))
        with pytest.raises(ValueError, match="384"):
            embed_batch(job, encoder=bad_encoder)
        assert not out.exists()
        assert not (tmp_path / "bad.xldv.tmp").exists()

    def test_dimension_failure_in_late_batch_writes_nothing(self, record_file,
                                                            tmp_path):
        calls = {"n": 0}

        def flaky(texts):
            calls["n"] += 1
            dim = 384 if calls["n"] == 1 else 100
            return np.zeros((len(texts), dim), dtype=np.float32)

        records = [make_record(f"r{i}", f"T{i}", f"A{i}") for i in range(6)]
        path = record_file(records)
        out = tmp_path / "flaky.xldv"
        job = EmbedJob(input_path=str(path), output_path=str(out), batch_size=3)
        with pytest.raises(ValueError):
            embed_batch(job, encoder=flaky)
        assert not out.exists()

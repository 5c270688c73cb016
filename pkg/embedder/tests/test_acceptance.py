"""Release checks for the embedder, printed one PASS line each."""
import logging
import warnings

import numpy as np
import pytest

from conftest import fake_encoder, make_record
from xldrift_embedder.embed import EmbedJob, ModelLoadError, embed_batch, load_encoder
from xldrift_embedder.records import write_records


def hundred_records():
    records = []
    for i in range(100):
        ctype = "native_ja" if i % 2 == 0 else "mt_en"
        records.append(make_record(
            f"proj{i:04d}",
            title=f"Project title {i}",
            abstract=f"Abstract body number {i} with varied wording.",
            ctype=ctype,
        ))
    return records


def test_vector_file_interop_and_rerun_identity(tmp_path, caplog):
    from xldrift.corpus import Corpus, CoordinateType, ProjectRecord, load_vectors

    records = hundred_records()
    record_path = tmp_path / "records.jsonl"
    write_records(record_path, records)

    outputs = []
    for name in ("run1.xldv", "run2.xldv"):
        out = tmp_path / name
        job = EmbedJob(input_path=str(record_path), output_path=str(out))
        count = embed_batch(job, encoder=fake_encoder)
        assert count == 100
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]

    corpus = Corpus()
    for r in records:
        corpus.add_record(ProjectRecord(
            id=r.id, agency=r.agency,
            coordinate_type=CoordinateType(r.coordinate_type),
            title=r.title, abstract=r.abstract,
        ))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        with caplog.at_level(logging.WARNING):
            load_vectors(corpus, tmp_path / "run1.xldv")
    assert not caplog.records
    assert len(corpus.vectors) == 100
    assert all(v.shape == (384,) for v in corpus.vectors.values())
    print("\n[PASS] vector-file interop: 100-record fixture loads cleanly, "
          "reruns byte-identical")


def test_dimension_check_enforced(tmp_path):
    record_path = tmp_path / "records.jsonl"
    write_records(record_path, [make_record("a", "T", "A")])
    out = tmp_path / "out.xldv"

    def wrong_dim(texts):
        return np.zeros((len(texts), 512), dtype=np.float32)

    job = EmbedJob(input_path=str(record_path), output_path=str(out))
    with pytest.raises(ValueError, match="384"):
        embed_batch(job, encoder=wrong_dim)
    assert not out.exists()
    print("\n[PASS] dimension check: non-384 model output aborts before writing")


# Hand-built paraphrase pairs: Japanese sentence and its English translation.
PARAPHRASE_FIXTURE = [
    ("猫がソファの上で眠っています。", "The cat is sleeping on the sofa."),
    ("明日は雨が降るでしょう。", "It will probably rain tomorrow."),
    ("彼は毎朝コーヒーを飲みます。", "He drinks coffee every morning."),
    ("この研究は新しい治療法の開発を目指しています。",
     "This research aims to develop a new treatment."),
    ("子供たちは公園でサッカーをしています。",
     "The children are playing soccer in the park."),
    ("地球温暖化は深刻な問題です。", "Global warming is a serious problem."),
    ("私は昨日新しい本を買いました。", "I bought a new book yesterday."),
    ("この橋は百年前に建設されました。",
     "This bridge was constructed a hundred years ago."),
    ("音楽を聴くことはストレスを減らします。",
     "Listening to music reduces stress."),
    ("その会議は来週の月曜日に開かれます。",
     "The meeting will be held next Monday."),
]


def test_cross_lingual_sanity():
    """Each translation pair should be mutually nearer than any non-pair
    for at least 8 of the 10 sentences, using the real pretrained model."""
    job = EmbedJob(input_path="", output_path="")
    try:
        encoder = load_encoder(job)
    except ModelLoadError as exc:
        pytest.skip(f"pretrained model unavailable in this environment: {exc}")
    try:
        ja = np.asarray(encoder([j for j, _ in PARAPHRASE_FIXTURE]))
        en = np.asarray(encoder([e for _, e in PARAPHRASE_FIXTURE]))
    except Exception as exc:  # model download needs network access
        pytest.skip(f"model inference unavailable in this environment: {exc}")

    ja = ja / np.linalg.norm(ja, axis=1, keepdims=True)
    en = en / np.linalg.norm(en, axis=1, keepdims=True)
    dists = np.linalg.norm(ja[:, None, :] - en[None, :, :], axis=2)

    wins = sum(
        1 for i in range(10)
        if dists[i, i] < min(np.delete(dists[i, :], i).min(),
                             np.delete(dists[:, i], i).min())
    )
    assert wins >= 8
    print(f"\n[PASS] cross-lingual sanity: {wins}/10 pairs nearest mutually")

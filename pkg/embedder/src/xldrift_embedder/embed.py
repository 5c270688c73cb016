"""Batch embedding of record files into XLDV vector files."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import numpy as np

from .compose import compose_all
from .records import read_records
from .vectorfile import write_vector_file

log = logging.getLogger(__name__)

DEFAULT_MODEL = "paraphrase-multilingual-MiniLM-L12-v2"
EXPECTED_DIMENSION = 384


@dataclass
class EmbedJob:
    input_path: str
    output_path: str
    model: str = DEFAULT_MODEL
    batch_size: int = 64
    device: str | None = None


class ModelLoadError(RuntimeError):
    """The embedding model could not be loaded in this environment."""


def load_encoder(job: EmbedJob):
    """Return an encode(texts) callable backed by sentence-transformers.

    Kept separate from embed_batch so tests can substitute a
    deterministic stand-in encoder.
    """
    try:
        from sentence_transformers import SentenceTransformer
    except ImportError as exc:
        raise ModelLoadError(f"sentence-transformers is not installed: {exc}") from exc
    try:
        model = SentenceTransformer(job.model, device=job.device)
    except Exception as exc:
        raise ModelLoadError(f"could not load model {job.model!r}: {exc}") from exc

    limit = getattr(model, "max_seq_length", None)
    if limit is not None:
        log.info("model %s truncates inputs beyond %s tokens", job.model, limit)

    def encode(texts):
        return model.encode(
            texts,
            batch_size=job.batch_size,
            convert_to_numpy=True,
            normalize_embeddings=False,
            show_progress_bar=False,
        )

    return encode


def embed_batch(job: EmbedJob, encoder=None) -> int:
    """Embed every complete record in the input file; return count written.

    Vectors are written raw (unnormalized) in input-file order, batched at
    job.batch_size. If any batch comes back with dimension != 384 the job
    aborts before anything is written.
    """
    if encoder is None:
        encoder = load_encoder(job)

    records = read_records(job.input_path)
    kept = list(compose_all(records))
    log.info("embedding %d of %d records from %s",
             len(kept), len(records), job.input_path)

    entries = []
    for start in range(0, len(kept), job.batch_size):
        batch = kept[start:start + job.batch_size]
        vecs = np.asarray(encoder([text for _, text in batch]))
        if vecs.ndim != 2 or vecs.shape != (len(batch), EXPECTED_DIMENSION):
            raise ValueError(
                f"model output shape {vecs.shape} does not match "
                f"({len(batch)}, {EXPECTED_DIMENSION}); aborting before write"
            )
        for (record, _), vec in zip(batch, vecs):
            entries.append(((record.id, record.coordinate_type), vec))

    tmp = job.output_path + ".tmp"
    write_vector_file(tmp, entries, EXPECTED_DIMENSION)
    os.replace(tmp, job.output_path)
    return len(entries)

"""Text composition for embedding: title + space + abstract."""
from __future__ import annotations

import logging

log = logging.getLogger(__name__)


def compose_text(record) -> str:
    """Return the embedding input text for a complete record.

    Each field is stripped of leading/trailing whitespace, then joined
    with a single space. Raises ValueError on incomplete records; use
    compose_all to skip them with a warning instead.
    """
    if not record.complete:
        raise ValueError(f"record {record.id!r} is incomplete")
    return f"{record.title.strip()} {record.abstract.strip()}"


def compose_all(records):
    """Yield (record, text) for complete records, warning on the rest."""
    for record in records:
        if not record.complete:
            log.warning(
                "skipping incomplete record (%s, %s): missing title or abstract",
                record.id, record.coordinate_type,
            )
            continue
        yield record, compose_text(record)

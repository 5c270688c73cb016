"""File-based translation pass-through.

No translation happens here: pre-existing translations come from a
sidecar JSON Lines file (objects with id, title_translated,
abstract_translated) and are re-emitted as mt_en-coordinate records.
"""
from __future__ import annotations

import json
import logging

from .records import RawRecord

log = logging.getLogger(__name__)

MT_EN = "mt_en"


def read_sidecar(path) -> dict[str, dict]:
    """Load the sidecar file into an id -> entry mapping."""
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: invalid JSON: {exc}") from None
            if "id" not in obj:
                raise ValueError(f"{path}:{line_no}: missing 'id'")
            entries[str(obj["id"])] = obj
    return entries


def translate_passthrough(records, sidecar: dict[str, dict]) -> list[RawRecord]:
    """Join records with sidecar translations, emitting mt_en records.

    Records with no sidecar entry, or whose entry is missing either
    translated field, are skipped with a warning.
    """
    out = []
    for record in records:
        entry = sidecar.get(record.id)
        if entry is None:
            log.warning("no sidecar translation for %s; skipped", record.id)
            continue
        title = entry.get("title_translated") or ""
        abstract = entry.get("abstract_translated") or ""
        if not title or not abstract:
            log.warning("sidecar entry for %s is missing a translated field; "
                        "skipped", record.id)
            continue
        out.append(RawRecord(
            id=record.id,
            agency=record.agency,
            coordinate_type=MT_EN,
            title=title,
            abstract=abstract,
            fiscal_year=record.fiscal_year,
        ))
    return out

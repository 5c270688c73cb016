"""Reader/writer for the JSON Lines record interchange format.

Kept independent of the analysis package on purpose: the two sides share
only the file formats.
"""
from __future__ import annotations

import json
from dataclasses import dataclass


@dataclass(frozen=True)
class RawRecord:
    id: str
    agency: str
    coordinate_type: str
    title: str
    abstract: str
    fiscal_year: int | None = None

    @property
    def complete(self) -> bool:
        return bool(self.title) and bool(self.abstract)


REQUIRED_FIELDS = ("id", "agency", "coordinate_type", "title", "abstract")


def read_records(path) -> list[RawRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: invalid JSON: {exc}") from None
            missing = [f for f in REQUIRED_FIELDS if f not in obj]
            if missing:
                raise ValueError(f"{path}:{line_no}: missing fields {missing}")
            records.append(
                RawRecord(
                    id=str(obj["id"]),
                    agency=str(obj["agency"]),
                    coordinate_type=str(obj["coordinate_type"]),
                    title=str(obj["title"]),
                    abstract=str(obj["abstract"]),
                    fiscal_year=obj.get("fiscal_year"),
                )
            )
    return records


def write_records(path, records) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            obj = {
                "id": r.id,
                "agency": r.agency,
                "coordinate_type": r.coordinate_type,
                "title": r.title,
                "abstract": r.abstract,
            }
            if r.fiscal_year is not None:
                obj["fiscal_year"] = r.fiscal_year
            fh.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")

"""Writer for the ``XLDV`` binary vector container.

Layout (little-endian): magic ``XLDV``, u32 version=1, u32 dimension,
u64 count, then per point a u16 key length, the UTF-8 key bytes
``id NUL coordinate_type``, and ``dimension`` float32 components.
"""
from __future__ import annotations

import struct

import numpy as np

MAGIC = b"XLDV"
VERSION = 1
_HEADER = struct.Struct("<4sIIQ")


def write_vector_file(path, entries, dimension: int) -> None:
    """entries: iterable of ((id, coordinate_type), vector) in final order."""
    entries = list(entries)
    for (pid, ctype), vec in entries:
        vec = np.asarray(vec)
        if vec.shape != (dimension,):
            raise ValueError(
                f"vector for ({pid!r}, {ctype!r}) has shape {vec.shape}, "
                f"expected ({dimension},)"
            )
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, dimension, len(entries)))
        for (pid, ctype), vec in entries:
            key = f"{pid}\x00{ctype}".encode("utf-8")
            fh.write(struct.pack("<H", len(key)))
            fh.write(key)
            fh.write(np.asarray(vec, dtype="<f4").tobytes())

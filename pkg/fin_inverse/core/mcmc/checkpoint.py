"""
Binary chain checkpoint, little-endian:

    magic "FRCK" | version u32 | m u32 | n u32 | Lx f64 | Ly f64
    | iteration, accepted, floor_rejected, degenerate u64 | f, T, best_f f64
    | K (n*m f64, row j = 1..n) | update counts (n*m u64) | RNG state | CRC32 u32
"""

from __future__ import annotations
import os
import struct
import zlib
from pathlib import Path

import numpy as np

from ..errors import CheckpointCorruptError, CheckpointVersionError
from ..grid.fields import ConductivityField
from ..grid.mesh import make_mesh
from ..proposals.rng import STATE_SIZE, RngStream
from .engine import ChainState

MAGIC = b"FRCK"
VERSION = 1
_HEADER = struct.Struct("<4sIIIddQQQQddd")
_CRC = struct.Struct("<I")


def checkpoint_save(state: ChainState, path: Path) -> None:
    mesh = state.k.mesh
    header = _HEADER.pack(
        MAGIC, VERSION, mesh.m, mesh.n, mesh.lx, mesh.ly,
        state.iteration, state.accepted, state.floor_rejected, state.degenerate,
        state.f, state.t, state.best_f,
    )
    body = b"".join(
        [
            header,
            state.k.values.astype("<f8").tobytes(),
            state.update_counts.astype("<u8").tobytes(),
            state.rng.to_bytes(),
        ]
    )
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(body + _CRC.pack(zlib.crc32(body)))
    os.replace(tmp, path)


def checkpoint_load(path: Path) -> ChainState:
    raw = path.read_bytes()
    if len(raw) < _HEADER.size + _CRC.size or raw[:4] != MAGIC:
        raise CheckpointCorruptError(f"{path}: not a chain checkpoint")
    body, (crc,) = raw[:-_CRC.size], _CRC.unpack(raw[-_CRC.size:])
    if zlib.crc32(body) != crc:
        raise CheckpointCorruptError(f"{path}: checksum mismatch (truncated or corrupt)")
    (_, version, m, n, lx, ly, iteration, accepted, floor_rejected, degenerate,
     f, t, best_f) = _HEADER.unpack_from(body)
    if version != VERSION:
        raise CheckpointVersionError(f"{path}: checkpoint version {version}, expected {VERSION}")
    size = m * n
    expected = _HEADER.size + 16 * size + STATE_SIZE
    if len(body) != expected:
        raise CheckpointCorruptError(f"{path}: expected {expected} bytes, found {len(body)}")
    offset = _HEADER.size
    k = np.frombuffer(body, dtype="<f8", count=size, offset=offset).reshape(n, m)
    offset += 8 * size
    counts = np.frombuffer(body, dtype="<u8", count=size, offset=offset).reshape(n, m)
    offset += 8 * size
    return ChainState(
        k=ConductivityField(make_mesh(m, n, lx, ly), k.astype(np.float64)),
        f=f,
        t=t,
        rng=RngStream.from_bytes(body[offset:offset + STATE_SIZE]),
        iteration=iteration,
        accepted=accepted,
        floor_rejected=floor_rejected,
        degenerate=degenerate,
        best_f=best_f,
        update_counts=counts.astype(np.int64),
    )

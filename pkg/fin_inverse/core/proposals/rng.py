"""Seedable random stream with a fixed-layout serialisable state."""

from __future__ import annotations
import hashlib
import struct

import numpy as np

_MASK64 = (1 << 64) - 1
_STATE_FORMAT = "<16s16sII"
STATE_SIZE = struct.calcsize(_STATE_FORMAT)


def derive_seed(master: int, index: int) -> int:
    """64-bit seed for chain/run `index`: blake2b of (master XOR index, index)."""
    payload = struct.pack("<QQ", (master ^ index) & _MASK64, index & _MASK64)
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


class RngStream:
    """PCG64 stream; one owner per chain."""

    def __init__(self, seed: int = 0) -> None:
        self._bitgen = np.random.PCG64(seed & _MASK64)
        self._gen = np.random.Generator(self._bitgen)

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        return float(self._gen.uniform(low, high))

    def integers(self, high: int) -> int:
        return int(self._gen.integers(0, high))

    def normal(self, scale: float, size: int) -> np.ndarray:
        return self._gen.normal(0.0, scale, size)

    def to_bytes(self) -> bytes:
        st = self._bitgen.state
        return struct.pack(
            _STATE_FORMAT,
            st["state"]["state"].to_bytes(16, "little"),
            st["state"]["inc"].to_bytes(16, "little"),
            int(st["has_uint32"]),
            int(st["uinteger"]),
        )

    @classmethod
    def from_bytes(cls, raw: bytes) -> RngStream:
        state, inc, has_uint32, uinteger = struct.unpack(_STATE_FORMAT, raw)
        stream = cls(0)
        stream._bitgen.state = {
            "bit_generator": "PCG64",
            "state": {
                "state": int.from_bytes(state, "little"),
                "inc": int.from_bytes(inc, "little"),
            },
            "has_uint32": has_uint32,
            "uinteger": uinteger,
        }
        return stream

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RngStream) and self.to_bytes() == other.to_bytes()

    def __hash__(self) -> int:
        return hash(self.to_bytes())

"""Shared vocabulary: languages, halt reasons, execution reports and tracer tokens."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

SOUP_TAPE_LEN = 64
LONG_TAPE_LEN = 65_536
DEFAULT_BUDGET = 8192
FORTH_COPY_BUDGET = 1000


class Language(enum.IntEnum):
    """Language codes. The integer value is what snapshots and kernels store."""

    BFF = 0
    FORTH_SOUP = 1
    FORTH_COPY = 2
    SUBLEQ = 3
    RSUBLEQ4 = 4

    @property
    def cli_name(self) -> str:
        return _NAMES[self]

    @classmethod
    def parse(cls, name: "str | Language") -> "Language":
        if isinstance(name, Language):
            return name
        try:
            return _BY_NAME[name]
        except KeyError:
            raise ValueError(
                f"unknown language {name!r}; expected one of {sorted(_BY_NAME)}"
            ) from None

    @property
    def default_budget(self) -> int:
        return FORTH_COPY_BUDGET if self is Language.FORTH_COPY else DEFAULT_BUDGET


_NAMES = {
    Language.BFF: "bff",
    Language.FORTH_SOUP: "forth-soup",
    Language.FORTH_COPY: "forth-copy",
    Language.SUBLEQ: "subleq",
    Language.RSUBLEQ4: "rsubleq4",
}
_BY_NAME = {v: k for k, v in _NAMES.items()}
LANGUAGE_NAMES = tuple(_NAMES.values())


class HaltReason(enum.IntEnum):
    BUDGET_EXHAUSTED = 0
    PC_OUT_OF_BOUNDS = 1
    UNMATCHED_BRACKET = 2
    STACK_UNDERFLOW = 3
    STACK_OVERFLOW = 4
    EXPLICIT_HALT = 5




@dataclass(frozen=True)
class ExecReport:
    steps_executed: int
    halt_reason: HaltReason


# Tracer token layout, most to least significant: epoch (24) | position (32) | char (8)
TOKEN_EPOCH_BITS = 24
TOKEN_POSITION_BITS = 32
TOKEN_CHAR_BITS = 8
_EPOCH_SHIFT = TOKEN_POSITION_BITS + TOKEN_CHAR_BITS
_EPOCH_MASK = (1 << TOKEN_EPOCH_BITS) - 1
_POS_MASK = (1 << TOKEN_POSITION_BITS) - 1
CHAR_CLEAR_MASK = np.uint64(0xFFFF_FFFF_FFFF_FF00)


def pack_token(epoch, position, char):
    """Pack (epoch, position, char) into uint64 tokens. Works on scalars and arrays."""
    epoch = np.asarray(epoch, dtype=np.uint64) & np.uint64(_EPOCH_MASK)
    position = np.asarray(position, dtype=np.uint64) & np.uint64(_POS_MASK)
    char = np.asarray(char, dtype=np.uint64) & np.uint64(0xFF)
    out = (epoch << np.uint64(_EPOCH_SHIFT)) | (position << np.uint64(TOKEN_CHAR_BITS)) | char
    return out[()] if out.ndim == 0 else out


def unpack_token(token):
    """Inverse of :func:`pack_token`; returns ``(epoch, position, char)``."""
    t = np.asarray(token, dtype=np.uint64)
    epoch = (t >> np.uint64(_EPOCH_SHIFT)) & np.uint64(_EPOCH_MASK)
    position = (t >> np.uint64(TOKEN_CHAR_BITS)) & np.uint64(_POS_MASK)
    char = t & np.uint64(0xFF)
    if t.ndim == 0:
        return int(epoch), int(position), int(char)
    return epoch, position, char


def fresh_tokens(data: np.ndarray, epoch: int = 0, offset: int = 0) -> np.ndarray:
    """Tokens for newly created bytes: one per byte, positions numbered from ``offset``."""
    flat = np.ascontiguousarray(data).reshape(-1)
    pos = np.arange(offset, offset + flat.size, dtype=np.uint64)
    return pack_token(epoch, pos, flat).reshape(np.shape(data))


def as_tape(data) -> np.ndarray:
    """Coerce bytes, lists of ints (signed allowed) or arrays to a uint8 tape."""
    if isinstance(data, (bytes, bytearray, memoryview)):
        return np.frombuffer(bytes(data), dtype=np.uint8).copy()
    arr = np.asarray(data)
    if arr.dtype == np.uint8:
        return arr.copy()
    return (arr.astype(np.int64) & 0xFF).astype(np.uint8)

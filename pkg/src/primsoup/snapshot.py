"""Binary snapshots of a soup or long tape.

Layout, all little-endian::

    magic      6 bytes  b"RSOUP1"
    language   u8       Language code
    topology   u8       0 well-mixed, 1 grid2d, 2 longtape
    has_tokens u8
    reserved   u8
    width      u32      programs (well-mixed), grid width, or 1 (long tape)
    height     u32      1, grid height, 1
    tape_len   u32      bytes per program, or the long tape length
    epoch      u64      epoch or generation
    seed       u64
    data       width*height*tape_len bytes
    tokens     the same count of u64, present iff has_tokens
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Language

MAGIC = b"RSOUP1"
_HEADER = struct.Struct("<6sBBBBIIIQQ")


class Topology(enum.IntEnum):
    WELL_MIXED = 0
    GRID2D = 1
    LONGTAPE = 2

    @property
    def cli_name(self) -> str:
        return self.name.lower().replace("_", "-")

    @classmethod
    def parse(cls, name: "str | Topology") -> "Topology":
        if isinstance(name, Topology):
            return name
        for t in cls:
            if t.cli_name == name:
                return t
        raise ValueError(f"unknown topology {name!r}; expected one of {[t.cli_name for t in cls]}")


class SnapshotError(ValueError):
    pass


@dataclass
class Snapshot:
    language: Language
    topology: Topology
    width: int
    height: int
    tape_len: int
    epoch: int
    seed: int
    data: np.ndarray
    tokens: np.ndarray | None = None

    @property
    def num_programs(self) -> int:
        return self.width * self.height

    def programs(self) -> np.ndarray:
        return self.data.reshape(self.num_programs, self.tape_len)


def save(path, snap: Snapshot) -> None:
    data = np.ascontiguousarray(snap.data, dtype=np.uint8).reshape(-1)
    expected = snap.width * snap.height * snap.tape_len
    if data.size != expected:
        raise SnapshotError(f"data holds {data.size} bytes, header says {expected}")
    header = _HEADER.pack(MAGIC, int(snap.language), int(snap.topology),
                          int(snap.tokens is not None), 0, snap.width, snap.height,
                          snap.tape_len, snap.epoch, snap.seed & (2**64 - 1))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())
        if snap.tokens is not None:
            fh.write(np.ascontiguousarray(snap.tokens, dtype="<u8").reshape(-1).tobytes())


def load(path) -> Snapshot:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise SnapshotError(f"{path}: truncated header")
    magic, lang, topo, has_tokens, _, w, h, tlen, epoch, seed = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotError(f"{path}: not a snapshot (magic {magic!r})")
    n = w * h * tlen
    body = memoryview(raw)[_HEADER.size:]
    want = n * (9 if has_tokens else 1)
    if len(body) != want:
        raise SnapshotError(f"{path}: expected {want} payload bytes, found {len(body)}")
    try:
        language, topology = Language(lang), Topology(topo)
    except ValueError as exc:
        raise SnapshotError(f"{path}: {exc}") from None
    data = np.frombuffer(body[:n], dtype=np.uint8).copy()
    tokens = np.frombuffer(body[n:], dtype="<u8").astype(np.uint64) if has_tokens else None
    return Snapshot(language, topology, w, h, tlen, epoch, seed, data, tokens)


def from_soup(soup, language, seed: int) -> Snapshot:
    if soup.grid is None:
        topo, w, h = Topology.WELL_MIXED, soup.num_programs, 1
    else:
        topo, (w, h) = Topology.GRID2D, soup.grid
    tokens = None if soup.tokens is None else soup.tokens.reshape(-1)
    return Snapshot(Language.parse(language), topo, w, h, soup.tape_len, soup.epoch, seed,
                    soup.data(), tokens)


def from_world(world, language) -> Snapshot:
    return Snapshot(Language.parse(language), Topology.LONGTAPE, 1, 1, world.tape.size,
                    world.generation, world.seed, world.tape, world.tokens)


def to_soup(snap: Snapshot):
    from .soup import Soup

    if snap.topology is Topology.LONGTAPE:
        raise SnapshotError("long-tape snapshot cannot become a soup")
    grid = (snap.width, snap.height) if snap.topology is Topology.GRID2D else None
    tokens = None if snap.tokens is None else snap.tokens.reshape(snap.num_programs, snap.tape_len)
    return Soup(snap.programs().copy(), tokens, snap.epoch, grid)

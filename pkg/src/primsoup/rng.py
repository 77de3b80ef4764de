"""Counter-based random streams.

Every random decision in a run comes from a Philox stream addressed by
``(seed, stream_id, counter)``. Streams are pure functions of that triple, so
results do not depend on how work is scheduled, and the same triple yields
the same numbers on every platform (only raw 64-bit outputs are used; no
numpy ``Generator`` convenience methods whose algorithms may change).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numba
import numpy as np

_U64 = (1 << 64) - 1


class Stream(enum.IntEnum):
    """Named stream ids."""

    INIT = 1
    SHUFFLE = 2
    MUTATION_MASK = 3
    MUTATION_VALUE = 4
    PAIRING = 5
    SEEDING = 6
    WINDOW_START = 7
    LONGTAPE_MUTATION = 8


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int
    counter: int = 0

    def bitgen(self) -> np.random.Philox:
        key = (self.seed & _U64) | ((self.stream_id & _U64) << 64)
        # the counter selects a disjoint 2**128-block region of the stream
        return np.random.Philox(key=key, counter=(self.counter & _U64) << 128)

    def raw(self, n: int) -> np.ndarray:
        """First ``n`` raw uint64 outputs of this stream."""
        if n <= 0:
            return np.empty(0, dtype=np.uint64)
        return self.bitgen().random_raw(n)

    def uniform(self, n: int) -> np.ndarray:
        """``n`` doubles in [0, 1) with 53 random bits each."""
        return (self.raw(n) >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))

    def bytes(self, n: int) -> np.ndarray:
        words = self.raw((n + 7) // 8).astype("<u8")
        return words.view(np.uint8)[:n].copy()

    def integers(self, bound: int, n: int) -> np.ndarray:
        """``n`` unbiased integers in ``[0, bound)``."""
        if bound < 1:
            raise ValueError("bound must be >= 1")
        slack = 16
        while True:
            out = np.empty(n, dtype=np.int64)
            used = _fill_bounded(self.raw(n + slack), np.uint64(bound), out)
            if used >= 0:
                return out
            slack *= 4


@numba.njit(cache=True, nogil=True)
def bounded_draw(buf, pos, bound):
    """Unbiased draw in ``[0, bound)`` from ``buf`` starting at ``pos``.

    Rejects raw values below ``2**64 mod bound``. Returns ``(value, next_pos)``;
    ``next_pos`` is -1 when the buffer ran out.
    """
    threshold = (np.uint64(0) - bound) % bound
    while pos < buf.size:
        r = buf[pos]
        pos += 1
        if r >= threshold:
            return np.int64(r % bound), pos
    return np.int64(0), np.int64(-1)


@numba.njit(cache=True, nogil=True)
def _fill_bounded(buf, bound, out):
    pos = np.int64(0)
    for i in range(out.size):
        v, pos = bounded_draw(buf, pos, bound)
        if pos < 0:
            return -1
        out[i] = v
    return pos


@numba.njit(cache=True, nogil=True)
def _fisher_yates(buf, perm):
    pos = np.int64(0)
    for i in range(perm.size - 1, 0, -1):
        j, pos = bounded_draw(buf, pos, np.uint64(i + 1))
        if pos < 0:
            return -1
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
    return pos


def rng_shuffle(stream: RngStream, n: int) -> np.ndarray:
    """Uniform random permutation of ``0..n-1`` (Durstenfeld's Fisher-Yates)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    slack = 16
    while True:
        perm = np.arange(n, dtype=np.int64)
        if _fisher_yates(stream.raw(n + slack), perm) >= 0:
            return perm
        slack *= 4


class Streams:
    """Derives the per-epoch streams of one run from its seed.

    With ``fixed_shuffle`` the shuffle and pairing streams ignore the run seed,
    so every run replays the same sequence of interaction patterns.
    """

    FIXED_SHUFFLE_SEED = 0

    def __init__(self, seed: int, fixed_shuffle: bool = False):
        self.seed = int(seed)
        self.fixed_shuffle = fixed_shuffle

    def __call__(self, stream: Stream, counter: int = 0) -> RngStream:
        seed = self.seed
        if self.fixed_shuffle and stream in (Stream.SHUFFLE, Stream.PAIRING):
            seed = self.FIXED_SHUFFLE_SEED
        return RngStream(seed, int(stream), counter)


class BlockReader:
    """Sequential cursor over one stream, fetched ``block`` raw words at a time.

    Kernels consume ``buf`` from ``pos`` and hand the cursor back. A draw that
    runs off the end of a block is abandoned and restarted on the next block,
    so the sequence only depends on the seed, never on how calls are split.
    """

    BLOCK = 1 << 14

    def __init__(self, seed: int, stream_id: int, base: int = 0, block: int = BLOCK):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self.base = int(base)
        self.size = int(block)
        self.index = -1
        self.pos = 0
        self.buf = np.empty(0, dtype=np.uint64)
        self.refill()

    def refill(self) -> None:
        self.index += 1
        self.buf = RngStream(self.seed, self.stream_id, self.base + self.index).raw(self.size)
        self.pos = 0

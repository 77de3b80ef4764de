"""Primordial soup dynamics: pairing, concatenate-execute-split, mutation, seeding.

An epoch has three phases. Pairing is sequential and driven by the shuffle
and pairing streams. Pair execution touches disjoint tapes and may be split
across worker threads. Mutation is indexed by flat byte position. Results do
not depend on the worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .core import SOUP_TAPE_LEN, HaltReason, Language, as_tape, fresh_tokens, pack_token
from .rng import Stream, Streams, bounded_draw, rng_shuffle
from .vm import run_pairs

DEFAULT_MUTATION_RATE = 0.00024
DEFAULT_GRID = (240, 135)
GRID_RADIUS = 2


@dataclass
class MutationPolicy:
    rate: float = DEFAULT_MUTATION_RATE
    enabled: bool = True

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError(f"mutation rate {self.rate} outside [0, 1]")

    @property
    def effective_rate(self) -> float:
        return self.rate if self.enabled else 0.0


class Soup:
    """``N`` fixed-length programs, optional parallel tracer tokens, epoch counter.

    Grid soups store programs row-major: program ``y * width + x``.
    """

    def __init__(self, programs: np.ndarray, tokens: np.ndarray | None = None,
                 epoch: int = 0, grid: tuple[int, int] | None = None):
        programs = np.ascontiguousarray(programs, dtype=np.uint8)
        if programs.ndim != 2:
            raise ValueError("programs must be an (N, tape_len) array")
        if tokens is not None:
            tokens = np.ascontiguousarray(tokens, dtype=np.uint64)
            if tokens.shape != programs.shape:
                raise ValueError("tokens must match programs")
        if grid is not None and grid[0] * grid[1] != programs.shape[0]:
            raise ValueError(f"grid {grid} does not hold {programs.shape[0]} programs")
        self.programs = programs
        self.tokens = tokens
        self.epoch = int(epoch)
        self.grid = None if grid is None else (int(grid[0]), int(grid[1]))

    @classmethod
    def random(cls, num_programs: int = 1 << 17, tape_len: int = SOUP_TAPE_LEN,
               seed: int = 0, trace: bool = False, grid: tuple[int, int] | None = None,
               streams: Streams | None = None) -> "Soup":
        if grid is not None:
            num_programs = grid[0] * grid[1]
        if num_programs < 1 or tape_len < 1:
            raise ValueError("soup dimensions must be positive")
        streams = streams or Streams(seed)
        data = streams(Stream.INIT, 0).bytes(num_programs * tape_len)
        programs = data.reshape(num_programs, tape_len)
        tokens = fresh_tokens(programs) if trace else None
        return cls(programs, tokens, 0, grid)

    @classmethod
    def zeros(cls, num_programs: int, tape_len: int = SOUP_TAPE_LEN, trace: bool = False,
              grid: tuple[int, int] | None = None) -> "Soup":
        if grid is not None:
            num_programs = grid[0] * grid[1]
        programs = np.zeros((num_programs, tape_len), dtype=np.uint8)
        return cls(programs, fresh_tokens(programs) if trace else None, 0, grid)

    @property
    def num_programs(self) -> int:
        return self.programs.shape[0]

    @property
    def tape_len(self) -> int:
        return self.programs.shape[1]

    @property
    def traced(self) -> bool:
        return self.tokens is not None

    def data(self) -> np.ndarray:
        """All programs concatenated in index order (a view)."""
        return self.programs.reshape(-1)

    def copy(self) -> "Soup":
        return Soup(self.programs.copy(), None if self.tokens is None else self.tokens.copy(),
                    self.epoch, self.grid)


@dataclass
class EpochReport:
    epoch: int
    pairs: np.ndarray
    steps: np.ndarray
    halts: np.ndarray
    mutations: int = 0

    @property
    def mean_steps(self) -> float:
        return float(self.steps.mean()) if self.steps.size else 0.0

    @property
    def total_steps(self) -> int:
        return int(self.steps.sum())

    def halt_counts(self) -> dict[HaltReason, int]:
        counts = np.bincount(self.halts, minlength=len(HaltReason))
        return {r: int(counts[r]) for r in HaltReason}


def execute_pairs(soup: Soup, language, pairs: np.ndarray, budget: int | None = None,
                  workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Run every pair in place. Pairs must be disjoint."""
    lang = Language.parse(language)
    budget = lang.default_budget if budget is None else int(budget)
    pairs = np.ascontiguousarray(pairs, dtype=np.int64).reshape(-1, 2)
    steps = np.zeros(len(pairs), dtype=np.int64)
    halts = np.zeros(len(pairs), dtype=np.int64)
    trace = soup.traced
    tokens = soup.tokens if trace else np.empty((0, soup.tape_len), dtype=np.uint64)
    args = (soup.programs, tokens, trace)
    if workers <= 1 or len(pairs) < 2:
        run_pairs(*args, pairs, int(lang), budget, steps, halts)
        return steps, halts
    bounds = np.linspace(0, len(pairs), workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(run_pairs, *args, pairs[lo:hi], int(lang), budget, steps[lo:hi], halts[lo:hi])
            for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo
        ]
        for f in futures:
            f.result()
    return steps, halts


def well_mixed_pairs(n: int, streams: Streams, epoch: int) -> np.ndarray:
    """Shuffle then pair consecutive entries; the shuffle also fixes the order in each pair."""
    if n % 2:
        raise ValueError("well-mixed soup needs an even number of programs")
    return rng_shuffle(streams(Stream.SHUFFLE, epoch), n).reshape(-1, 2)


def mutate(soup: Soup, rate: float, streams: Streams, epoch: int) -> int:
    """Replace each byte with a uniform random byte with probability ``rate``.

    Mutated bytes get fresh tokens stamped with ``epoch + 1``. Returns the count.
    """
    if rate <= 0.0:
        return 0
    flat = soup.data()
    threshold = np.uint64(min(int(np.ceil(rate * (1 << 53))), 1 << 53))
    raw = streams(Stream.MUTATION_MASK, epoch).raw(flat.size)
    idx = np.flatnonzero((raw >> np.uint64(11)) < threshold)
    if idx.size == 0:
        return 0
    values = (streams(Stream.MUTATION_VALUE, epoch).raw(idx.size) & np.uint64(0xFF)).astype(np.uint8)
    flat[idx] = values
    if soup.tokens is not None:
        soup.tokens.reshape(-1)[idx] = pack_token(epoch + 1, idx, values)
    return int(idx.size)


def _resolve(streams, seed) -> Streams:
    if streams is not None:
        return streams
    return Streams(0 if seed is None else seed)


def epoch_well_mixed(soup: Soup, language, budget: int | None = None,
                     mutation: MutationPolicy | None = None, streams: Streams | None = None,
                     workers: int = 1, seed: int | None = None) -> EpochReport:
    """One well-mixed epoch: every program interacts exactly once, then mutation."""
    streams = _resolve(streams, seed)
    mutation = mutation or MutationPolicy()
    e = soup.epoch
    pairs = well_mixed_pairs(soup.num_programs, streams, e)
    steps, halts = execute_pairs(soup, language, pairs, budget, workers)
    n_mut = mutate(soup, mutation.effective_rate, streams, e)
    soup.epoch = e + 1
    return EpochReport(e + 1, pairs, steps, halts, n_mut)


@numba.njit(cache=True, nogil=True)
def _grid_pairs(width, height, order, raws, radius, torus, out):
    n = width * height
    taken = np.zeros(n, dtype=np.bool_)
    pos = np.int64(0)
    npairs = 0
    side = 2 * radius + 1
    for i in range(order.size):
        p = order[i]
        x = p % width
        y = p // width
        if torus:
            x0 = x - radius
            y0 = y - radius
            wx = side
            count = side * side - 1
            self_k = radius * side + radius
        else:
            x0 = max(0, x - radius)
            y0 = max(0, y - radius)
            wx = min(width - 1, x + radius) - x0 + 1
            wy = min(height - 1, y + radius) - y0 + 1
            count = wx * wy - 1
            self_k = (y - y0) * wx + (x - x0)
        if count <= 0:
            continue
        j, pos = bounded_draw(raws, pos, np.uint64(count))
        if pos < 0:
            return -1, pos
        k = j if j < self_k else j + 1
        nx = (x0 + k % wx) % width
        ny = (y0 + k // wx) % height
        q = ny * width + nx
        if not taken[p] and not taken[q]:
            taken[p] = True
            taken[q] = True
            out[npairs, 0] = p
            out[npairs, 1] = q
            npairs += 1
    return npairs, pos


def grid_pairs(width: int, height: int, streams: Streams, epoch: int,
               radius: int = GRID_RADIUS, torus: bool = False) -> np.ndarray:
    """Pairs for one grid epoch.

    Programs are visited in a fresh random order; each picks a uniform random
    neighbour within Chebyshev distance ``radius`` (itself excluded) and the
    two pair up if neither is taken yet. Edges clip the neighbourhood unless
    ``torus`` is set.
    """
    if torus and (width < 2 * radius + 1 or height < 2 * radius + 1):
        raise ValueError("torus neighbourhoods need each side >= 2 * radius + 1")
    n = width * height
    order = rng_shuffle(streams(Stream.SHUFFLE, epoch), n)
    out = np.empty((n // 2 + 1, 2), dtype=np.int64)
    slack = 16
    while True:
        raws = streams(Stream.PAIRING, epoch).raw(n + slack)
        npairs, _ = _grid_pairs(width, height, order, raws, radius, torus, out)
        if npairs >= 0:
            return out[:npairs].copy()
        slack *= 4


def epoch_grid2d(soup: Soup, language, budget: int | None = None,
                 mutation: MutationPolicy | None = None, streams: Streams | None = None,
                 workers: int = 1, seed: int | None = None, radius: int = GRID_RADIUS,
                 torus: bool = False) -> EpochReport:
    """One 2D epoch. Every program is mutated, paired or not."""
    if soup.grid is None:
        raise ValueError("soup has no grid shape")
    streams = _resolve(streams, seed)
    mutation = mutation or MutationPolicy()
    e = soup.epoch
    pairs = grid_pairs(*soup.grid, streams, e, radius, torus)
    steps, halts = execute_pairs(soup, language, pairs, budget, workers)
    n_mut = mutate(soup, mutation.effective_rate, streams, e)
    soup.epoch = e + 1
    return EpochReport(e + 1, pairs, steps, halts, n_mut)


def seed_replicator(soup: Soup, program, placement: str | int = "random",
                    streams: Streams | None = None, seed: int | None = None) -> int:
    """Write ``program`` at offset 0 of one tape; returns the tape index.

    ``placement`` is ``"random"`` (drawn from the seeding stream) or an index.
    Seeded bytes get fresh tokens stamped with the current epoch.
    """
    code = as_tape(program)
    if code.size > soup.tape_len:
        raise ValueError(f"program of {code.size} bytes does not fit a {soup.tape_len}-byte tape")
    if placement == "random":
        streams = _resolve(streams, seed)
        index = int(streams(Stream.SEEDING, soup.epoch).integers(soup.num_programs, 1)[0])
    else:
        index = int(placement)
        if not 0 <= index < soup.num_programs:
            raise IndexError(f"tape index {index} out of range 0..{soup.num_programs - 1}")
    soup.programs[index, : code.size] = code
    if soup.tokens is not None:
        soup.tokens[index, : code.size] = fresh_tokens(code, soup.epoch, index * soup.tape_len)
    return index

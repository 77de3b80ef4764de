"""One shared tape, no program boundaries.

Each window picks a uniform random start position and runs until the
machine halts or ``window_budget`` instructions have been fetched. Every
``mutation_interval`` executed instructions one random cell is overwritten
with a random *valid* instruction of the language. The count is an
accumulator, so 4,000,000 instructions at the default interval give exactly
10 mutations.

The default single worker is deterministic window by window. The optional
multi-worker mode shares the tape between threads without any locking and is
therefore not reproducible.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numba
import numpy as np

from . import bff
from .analysis import Compressor, get_compressor, high_order_entropy
from .core import LONG_TAPE_LEN, ExecReport, HaltReason, Language, fresh_tokens
from .rng import BlockReader, Stream, Streams, bounded_draw
from .vm import STATE_SIZE, run_lang, valid_opcodes

DEFAULT_MUTATION_INTERVAL = 400_000
DEFAULT_WINDOW_BUDGET = 1000
DEFAULT_WINDOWS_PER_GENERATION = 10_000

LONGTAPE_LANGUAGES = (Language.BFF, Language.FORTH_COPY)

_BFF = int(Language.BFF)

# kernel exit codes
_DONE, _NEED_WINDOW, _NEED_MUTATION = 0, 1, 2

# counters shared with the kernel
C_WINDOWS, C_EXECUTED, C_PENDING, C_MUTATIONS, C_WPOS, C_MPOS = range(6)


@numba.njit(cache=True, nogil=True)
def run_windows(tape, tokens, trace, lang, n, budget, offset, interval, opcodes, epoch,
                wbuf, mbuf, ctr, starts_out, steps_out, halts_out):
    """Run up to ``n`` more windows, resuming from the counters in ``ctr``.

    Returns ``(code, windows_done)``. On a ``_NEED_*`` code the caller refills
    that buffer and calls again with the remaining count.
    """
    L = tape.size
    st = np.zeros(STATE_SIZE, dtype=np.int64)
    nops = np.uint64(opcodes.size)
    done = 0
    while True:
        while ctr[C_PENDING] > 0:
            p, pos = bounded_draw(mbuf, ctr[C_MPOS], np.uint64(L))
            if pos < 0:
                return _NEED_MUTATION, done
            k, pos = bounded_draw(mbuf, pos, nops)
            if pos < 0:
                return _NEED_MUTATION, done
            ctr[C_MPOS] = pos
            v = opcodes[k]
            tape[p] = v
            if trace:
                tokens[p] = ((np.uint64(epoch) & np.uint64(0xFFFFFF)) << np.uint64(40)) | (np.uint64(p) << np.uint64(8)) | np.uint64(v)
            ctr[C_PENDING] -= 1
            ctr[C_MUTATIONS] += 1
        if done >= n:
            return _DONE, done
        start, pos = bounded_draw(wbuf, ctr[C_WPOS], np.uint64(L))
        if pos < 0:
            return _NEED_WINDOW, done
        ctr[C_WPOS] = pos
        st[:] = 0
        st[0] = start
        if lang == _BFF:
            st[bff.HEAD0] = start
            st[bff.HEAD1] = (start + offset) % L
        steps, reason = run_lang(lang, tape, tokens, trace, st, budget)
        starts_out[done] = start
        steps_out[done] = steps
        halts_out[done] = reason
        before = ctr[C_EXECUTED]
        ctr[C_EXECUTED] = before + steps
        if interval > 0:
            ctr[C_PENDING] += ctr[C_EXECUTED] // interval - before // interval
        ctr[C_WINDOWS] += 1
        done += 1


class LongTapeWorld:
    """A long tape plus the bookkeeping that makes runs resumable.

    ``head1_offset`` only matters for BFF, where each window starts with
    ``head0`` at the start position and ``head1`` that many cells further on.
    """

    def __init__(self, tape: np.ndarray, seed: int = 0, tokens: np.ndarray | None = None,
                 mutation_interval: int = DEFAULT_MUTATION_INTERVAL,
                 window_budget: int = DEFAULT_WINDOW_BUDGET, head1_offset: int = 0):
        tape = np.ascontiguousarray(tape, dtype=np.uint8)
        if tape.ndim != 1 or tape.size < 1:
            raise ValueError("tape must be a non-empty 1-D array")
        if tokens is not None and tokens.shape != tape.shape:
            raise ValueError("tokens must parallel the tape")
        if mutation_interval < 0 or window_budget < 0:
            raise ValueError("mutation_interval and window_budget must be >= 0")
        self.tape = tape
        self.tokens = None if tokens is None else np.ascontiguousarray(tokens, dtype=np.uint64)
        self.seed = int(seed)
        self.mutation_interval = int(mutation_interval)
        self.window_budget = int(window_budget)
        self.head1_offset = int(head1_offset)
        self.generation = 0
        self.counters = np.zeros(6, dtype=np.int64)
        self._windows = BlockReader(seed, Stream.WINDOW_START)
        self._mutations = BlockReader(seed, Stream.LONGTAPE_MUTATION)

    @classmethod
    def random(cls, tape_len: int = LONG_TAPE_LEN, seed: int = 0, trace: bool = False,
               **kwargs) -> "LongTapeWorld":
        tape = Streams(seed)(Stream.INIT, 0).bytes(tape_len)
        return cls(tape, seed, fresh_tokens(tape) if trace else None, **kwargs)

    @property
    def instructions_executed(self) -> int:
        return int(self.counters[C_EXECUTED])

    @property
    def mutations_applied(self) -> int:
        return int(self.counters[C_MUTATIONS])

    @property
    def windows_run(self) -> int:
        return int(self.counters[C_WINDOWS])

    @property
    def traced(self) -> bool:
        return self.tokens is not None

    def run(self, language, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Run ``n`` windows; returns their start positions, fetch counts and halt reasons."""
        lang = _parse(language)
        starts = np.zeros(n, dtype=np.int64)
        steps = np.zeros(n, dtype=np.int64)
        halts = np.zeros(n, dtype=np.int64)
        trace = self.traced
        tokens = self.tokens if trace else _NO_TOKENS
        ops = valid_opcodes(lang)
        done = 0
        while True:
            self.counters[C_WPOS] = self._windows.pos
            self.counters[C_MPOS] = self._mutations.pos
            code, k = run_windows(
                self.tape, tokens, trace, int(lang), n - done, self.window_budget,
                self.head1_offset, self.mutation_interval, ops, self.generation + 1,
                self._windows.buf, self._mutations.buf, self.counters,
                starts[done:], steps[done:], halts[done:],
            )
            done += k
            self._windows.pos = int(self.counters[C_WPOS])
            self._mutations.pos = int(self.counters[C_MPOS])
            if code == _DONE:
                return starts, steps, halts
            (self._windows if code == _NEED_WINDOW else self._mutations).refill()


_NO_TOKENS = np.empty(0, dtype=np.uint64)


def _parse(language) -> Language:
    lang = Language.parse(language)
    if lang not in LONGTAPE_LANGUAGES:
        raise ValueError(f"long-tape mode supports bff and forth-copy, not {lang.cli_name}")
    return lang


@dataclass(frozen=True)
class WindowReport(ExecReport):
    start_pc: int = 0
    mutations_applied: int = 0


def run_window(world: LongTapeWorld, language) -> WindowReport:
    """One window on the world's own random streams, then any mutations that fell due."""
    before = world.mutations_applied
    starts, steps, halts = world.run(language, 1)
    return WindowReport(int(steps[0]), HaltReason(int(halts[0])), int(starts[0]),
                        world.mutations_applied - before)


@dataclass
class GenerationStats:
    generation: int
    high_order_entropy: float
    mean_instructions_per_window: float
    mutations_applied: int


GENERATION_COLUMNS = [f.name for f in fields(GenerationStats)] + ["compressor"]


def run_generations(world: LongTapeWorld, language,
                    windows_per_generation: int = DEFAULT_WINDOWS_PER_GENERATION,
                    generations: int = 1, sink=None,
                    compressor: Compressor | str | None = None) -> list[GenerationStats]:
    """Run whole generations, measuring the tape after each one.

    ``sink`` (optional) is called with every :class:`GenerationStats` row.
    """
    comp = get_compressor(compressor)
    rows = []
    for _ in range(generations):
        before = world.mutations_applied
        _, steps, _ = world.run(language, windows_per_generation)
        world.generation += 1
        row = GenerationStats(
            world.generation,
            high_order_entropy(world.tape, comp),
            float(steps.mean()) if steps.size else 0.0,
            world.mutations_applied - before,
        )
        rows.append(row)
        if sink is not None:
            sink(row)
    return rows


def run_unsynchronized(world: LongTapeWorld, language, n: int, workers: int) -> np.ndarray:
    """Run ``n`` windows split across ``workers`` threads sharing the tape.

    No locks are taken: concurrent windows may tear each other's reads and
    writes. Each worker draws from its own region of the streams and keeps
    its own mutation accumulator. Results are NOT reproducible.
    Returns the per-window fetch counts.
    """
    lang = _parse(language)
    if workers <= 1:
        return world.run(lang, n)[1]
    trace = world.traced
    tokens = world.tokens if trace else _NO_TOKENS
    ops = valid_opcodes(lang)
    sizes = np.diff(np.linspace(0, n, workers + 1).astype(int))
    starts = [np.zeros(s, dtype=np.int64) for s in sizes]
    out = [np.zeros(s, dtype=np.int64) for s in sizes]
    halts = [np.zeros(s, dtype=np.int64) for s in sizes]
    executed = world.instructions_executed
    tag = world.windows_run

    def worker(w):
        base = ((w + 1) << 40) + tag
        wr = BlockReader(world.seed, Stream.WINDOW_START, base)
        mr = BlockReader(world.seed, Stream.LONGTAPE_MUTATION, base)
        ctr = np.zeros(6, dtype=np.int64)
        ctr[C_EXECUTED] = executed
        done = 0
        while True:
            ctr[C_WPOS], ctr[C_MPOS] = wr.pos, mr.pos
            code, k = run_windows(world.tape, tokens, trace, int(lang), sizes[w] - done,
                                  world.window_budget, world.head1_offset,
                                  world.mutation_interval, ops, world.generation + 1,
                                  wr.buf, mr.buf, ctr, starts[w][done:], out[w][done:],
                                  halts[w][done:])
            done += k
            wr.pos, mr.pos = int(ctr[C_WPOS]), int(ctr[C_MPOS])
            if code == _DONE:
                return ctr
            (wr if code == _NEED_WINDOW else mr).refill()

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(worker, range(workers)))
    for ctr in results:
        world.counters[C_EXECUTED] += ctr[C_EXECUTED] - executed
        world.counters[C_WINDOWS] += ctr[C_WINDOWS]
        world.counters[C_MUTATIONS] += ctr[C_MUTATIONS]
    return np.concatenate(out)

"""Run a :class:`RunConfig` end to end: simulate, sample statistics, write outputs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import snapshot
from .analysis import detect_transition, get_compressor, high_order_entropy, measure, write_stats_csv
from .config import RunConfig
from .core import fresh_tokens
from .longtape import GENERATION_COLUMNS, GenerationStats, LongTapeWorld
from .replicators import load_program
from .rng import Stream, Streams
from .snapshot import Topology
from .soup import MutationPolicy, Soup, epoch_grid2d, epoch_well_mixed, seed_replicator

STATS_FILE = "stats.csv"
CONFIG_FILE = "config.json"
SNAPSHOT_DIR = "snapshots"


@dataclass
class RunResult:
    config: RunConfig
    rows: list = field(default_factory=list)
    transition_epoch: int | None = None
    final_epoch: int = 0
    soup: Soup | None = None
    world: LongTapeWorld | None = None
    seeded_at: int | None = None
    compressor: str = ""
    stats_path: Path | None = None
    snapshot_paths: list[Path] = field(default_factory=list)

    def series(self) -> list[tuple[int, float]]:
        key = "generation" if self.world is not None else "epoch"
        return [(getattr(r, key), r.high_order_entropy) for r in self.rows]


def _placement(config: RunConfig):
    return "random" if config.seed_placement == "random" else int(config.seed_placement)


class _Outputs:
    def __init__(self, config: RunConfig, result: RunResult):
        self.config = config
        self.result = result
        self.root = None if config.output_dir is None else Path(config.output_dir)
        if self.root is not None:
            (self.root / SNAPSHOT_DIR).mkdir(parents=True, exist_ok=True)
            config.save(self.root / CONFIG_FILE)

    def snapshot(self, snap: snapshot.Snapshot) -> None:
        if self.root is None:
            return
        path = self.root / SNAPSHOT_DIR / f"{snap.topology.cli_name}-{snap.epoch:08d}.rsoup"
        snapshot.save(path, snap)
        self.result.snapshot_paths.append(path)

    def stats(self, columns=None) -> None:
        if self.root is None:
            return
        path = self.root / STATS_FILE
        write_stats_csv(path, self.result.rows, self.result.compressor, columns)
        self.result.stats_path = path


def run_experiment(config: RunConfig, progress=None) -> RunResult:
    """Run ``config`` to completion (or to the first transition when asked to stop there).

    ``progress``, if given, is called with every statistics row as it is produced.
    """
    if config.topo is Topology.LONGTAPE:
        return _run_longtape(config, progress)
    return _run_soup(config, progress)


def _due(every: int, epoch: int, last: int) -> bool:
    return every > 0 and (epoch % every == 0 or epoch == last)


def _run_soup(config: RunConfig, progress) -> RunResult:
    lang = config.lang
    comp = get_compressor(config.compressor)
    streams = Streams(config.seed, config.fixed_shuffle)
    grid = (config.grid_width, config.grid_height) if config.topo is Topology.GRID2D else None
    soup = Soup.random(config.num_programs, config.tape_len, config.seed, config.trace,
                       grid=grid, streams=streams)
    result = RunResult(config, soup=soup, compressor=comp.ident)
    out = _Outputs(config, result)
    if config.seed_replicator:
        code = load_program(config.seed_replicator)
        result.seeded_at = seed_replicator(soup, code, _placement(config), streams)

    def sample(mean_steps):
        row = measure(soup.epoch, soup.data(), soup.tokens, mean_steps, comp)
        result.rows.append(row)
        if progress is not None:
            progress(row)
        if result.transition_epoch is None and row.high_order_entropy >= config.transition_threshold:
            result.transition_epoch = row.epoch
        return row

    def snap():
        out.snapshot(snapshot.from_soup(soup, lang, config.seed))

    mutation = MutationPolicy(config.mutation_rate, config.mutation_rate > 0)
    sample(math.nan)
    for _ in range(config.epochs):
        if grid is None:
            report = epoch_well_mixed(soup, lang, config.effective_budget, mutation, streams,
                                      config.workers)
        else:
            report = epoch_grid2d(soup, lang, config.effective_budget, mutation, streams,
                                  config.workers, torus=config.torus)
        if _due(config.sample_every(result.rows[-1].high_order_entropy), soup.epoch, config.epochs):
            sample(report.mean_steps)
        if config.stop_on_transition and result.transition_epoch is not None:
            break
        if _due(config.snapshot_every, soup.epoch, config.epochs) and soup.epoch != config.epochs:
            snap()
    snap()
    out.stats()
    result.final_epoch = soup.epoch
    return result


def _run_longtape(config: RunConfig, progress) -> RunResult:
    lang = config.lang
    comp = get_compressor(config.compressor)
    world = LongTapeWorld.random(
        config.long_tape_len, config.seed, config.trace,
        mutation_interval=config.mutation_interval,
        window_budget=config.effective_budget,
        head1_offset=config.head1_offset,
    )
    result = RunResult(config, world=world, compressor=comp.ident)
    out = _Outputs(config, result)
    if config.seed_replicator:
        code = load_program(config.seed_replicator)
        result.seeded_at = seed_long_tape(world, code, _placement(config))

    steps_since, mutations_since = [], world.mutations_applied

    def sample():
        nonlocal steps_since, mutations_since
        steps = np.concatenate(steps_since) if steps_since else np.empty(0)
        row = GenerationStats(
            world.generation,
            high_order_entropy(world.tape, comp),
            float(steps.mean()) if steps.size else math.nan,
            world.mutations_applied - mutations_since,
        )
        steps_since, mutations_since = [], world.mutations_applied
        result.rows.append(row)
        if progress is not None:
            progress(row)
        if result.transition_epoch is None and row.high_order_entropy >= config.transition_threshold:
            result.transition_epoch = row.generation

    def snap():
        out.snapshot(snapshot.from_world(world, lang))

    sample()
    for _ in range(config.epochs):
        _, steps, _ = world.run(lang, config.windows_per_generation)
        world.generation += 1
        steps_since.append(steps)
        if _due(config.sample_every(result.rows[-1].high_order_entropy), world.generation, config.epochs):
            sample()
        if config.stop_on_transition and result.transition_epoch is not None:
            break
        if _due(config.snapshot_every, world.generation, config.epochs) and world.generation != config.epochs:
            snap()
    snap()
    out.stats(GENERATION_COLUMNS)
    result.final_epoch = world.generation
    return result


def seed_long_tape(world: LongTapeWorld, program, placement="random") -> int:
    """Write ``program`` into the long tape; returns the offset used."""
    code = np.asarray(program, dtype=np.uint8)
    span = world.tape.size - code.size + 1
    if span < 1:
        raise ValueError("program longer than the tape")
    if placement == "random":
        offset = int(Streams(world.seed)(Stream.SEEDING, world.generation).integers(span, 1)[0])
    else:
        offset = int(placement)
        if not 0 <= offset < span:
            raise IndexError(f"offset {offset} out of range 0..{span - 1}")
    world.tape[offset: offset + code.size] = code
    if world.tokens is not None:
        world.tokens[offset: offset + code.size] = fresh_tokens(code, world.generation, offset)
    return offset


def transition_of(result: RunResult, threshold: float = 1.0) -> int | None:
    return detect_transition(result.series(), threshold)

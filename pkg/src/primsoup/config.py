"""Run configuration with a lossless JSON form."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace

from .core import LONG_TAPE_LEN, SOUP_TAPE_LEN, Language
from .longtape import (
    DEFAULT_MUTATION_INTERVAL,
    DEFAULT_WINDOW_BUDGET,
    DEFAULT_WINDOWS_PER_GENERATION,
    LONGTAPE_LANGUAGES,
)
from .snapshot import Topology
from .soup import DEFAULT_GRID, DEFAULT_MUTATION_RATE


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a run.

    ``epochs`` counts soup epochs, or generations in long-tape mode.
    ``budget`` of ``None`` means the language default (window budget for
    long tapes). ``snapshot_every`` of 0 writes only the final snapshot.
    ``dense_every`` > 0 samples at that finer cadence once the last sample
    reaches ``dense_threshold``, until the transition threshold is crossed.
    """

    language: str = "bff"
    topology: str = "well-mixed"
    num_programs: int = 1 << 17
    grid_width: int = DEFAULT_GRID[0]
    grid_height: int = DEFAULT_GRID[1]
    tape_len: int = SOUP_TAPE_LEN
    epochs: int = 16_384
    budget: int | None = None
    mutation_rate: float = DEFAULT_MUTATION_RATE
    seed: int = 0
    trace: bool = False
    stats_every: int = 10
    dense_every: int = 0
    dense_threshold: float = 0.5
    snapshot_every: int = 0
    output_dir: str | None = None
    seed_replicator: str | None = None
    seed_placement: str = "random"
    fixed_shuffle: bool = False
    workers: int = 1
    stop_on_transition: bool = False
    transition_threshold: float = 1.0
    compressor: str = "brotli"
    torus: bool = False
    long_tape_len: int = LONG_TAPE_LEN
    windows_per_generation: int = DEFAULT_WINDOWS_PER_GENERATION
    mutation_interval: int = DEFAULT_MUTATION_INTERVAL
    head1_offset: int = 0

    def __post_init__(self):
        self.validate()

    @property
    def lang(self) -> Language:
        return Language.parse(self.language)

    @property
    def topo(self) -> Topology:
        return Topology.parse(self.topology)

    @property
    def effective_budget(self) -> int:
        if self.budget is not None:
            return self.budget
        if self.topo is Topology.LONGTAPE:
            return DEFAULT_WINDOW_BUDGET
        return self.lang.default_budget

    def sample_every(self, last_entropy: float | None) -> int:
        """Statistics cadence given the most recent high-order entropy sample."""
        if (self.dense_every and last_entropy is not None
                and self.dense_threshold <= last_entropy < self.transition_threshold):
            return self.dense_every
        return self.stats_every

    def validate(self) -> None:
        try:
            lang, topo = self.lang, self.topo
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        positive = ["num_programs", "grid_width", "grid_height", "tape_len", "stats_every",
                    "workers", "long_tape_len", "windows_per_generation"]
        for name in positive:
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        for name in ("epochs", "snapshot_every", "mutation_interval", "dense_every"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.budget is not None and self.budget < 0:
            raise ConfigError("budget must be >= 0")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ConfigError("mutation_rate must lie in [0, 1]")
        if topo is Topology.WELL_MIXED and self.num_programs % 2:
            raise ConfigError("well-mixed soups need an even number of programs")
        if topo is Topology.LONGTAPE and lang not in LONGTAPE_LANGUAGES:
            raise ConfigError("long-tape runs support bff and forth-copy only")
        if self.seed_placement != "random":
            try:
                int(self.seed_placement)
            except ValueError:
                raise ConfigError("seed_placement must be 'random' or a tape index") from None

    # ---------------------------------------------------------------- json

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls.from_json(fh.read())

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json() + "\n")

    def with_(self, **changes) -> "RunConfig":
        return replace(self, **changes)

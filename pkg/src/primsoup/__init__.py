"""Self-replicator emergence in soups of random byte programs."""

from .analysis import (
    EpochStats,
    detect_transition,
    get_compressor,
    high_order_entropy,
    measure,
    shannon_entropy,
    token_stats,
)
from .config import RunConfig
from .core import ExecReport, HaltReason, Language, pack_token, unpack_token
from .experiment import RunResult, run_experiment
from .longtape import LongTapeWorld, run_generations, run_window
from .rng import RngStream, Stream, Streams, rng_shuffle
from .soup import (
    MutationPolicy,
    Soup,
    epoch_grid2d,
    epoch_well_mixed,
    seed_replicator,
)
from .vm import execute

__all__ = [
    "EpochStats", "ExecReport", "HaltReason", "Language", "LongTapeWorld",
    "MutationPolicy", "RngStream", "RunConfig", "RunResult", "Soup", "Stream",
    "Streams", "detect_transition", "epoch_grid2d", "epoch_well_mixed", "execute",
    "get_compressor", "high_order_entropy", "measure", "pack_token", "rng_shuffle",
    "run_experiment", "run_generations", "run_window", "seed_replicator",
    "shannon_entropy", "token_stats", "unpack_token",
]

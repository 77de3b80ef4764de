"""Complexity and lineage instrumentation.

High-order entropy is the byte-level Shannon entropy minus the compressed
size per byte (in bits). I.i.d. noise scores about zero; a soup made of many
copies of one string scores about that string's own Shannon entropy.
"""

from __future__ import annotations

import csv
import zlib
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Sequence

import numpy as np

try:
    import brotli
except ImportError:  # pragma: no cover - brotli is a declared dependency
    brotli = None


class CompressorError(RuntimeError):
    pass


class Compressor:
    """Deterministic byte compressor used as a Kolmogorov-complexity proxy."""

    name = "abstract"

    def compress(self, data: bytes) -> bytes:
        raise NotImplementedError

    def compressed_size(self, data) -> int:
        payload = data.tobytes() if isinstance(data, np.ndarray) else bytes(data)
        try:
            return len(self.compress(payload))
        except Exception as exc:
            raise CompressorError(f"{self.ident} failed: {exc}") from exc

    @property
    def ident(self) -> str:
        return self.name


class BrotliCompressor(Compressor):
    name = "brotli"

    def __init__(self, quality: int = 2):
        if brotli is None:
            raise CompressorError("brotli module not available")
        self.quality = quality

    def compress(self, data: bytes) -> bytes:
        return brotli.compress(data, quality=self.quality)

    @property
    def ident(self) -> str:
        return f"brotli-{brotli.__version__}-q{self.quality}"


class ZlibCompressor(Compressor):
    name = "zlib"

    def __init__(self, level: int = 6):
        self.level = level

    def compress(self, data: bytes) -> bytes:
        return zlib.compress(data, self.level)

    @property
    def ident(self) -> str:
        return f"zlib-{zlib.ZLIB_VERSION}-l{self.level}"


def get_compressor(choice: str | Compressor | None = None) -> Compressor:
    """``None``/``"brotli"`` gives brotli quality 2; ``"zlib"`` or ``"zlib:9"`` style also work."""
    if isinstance(choice, Compressor):
        return choice
    if choice is None:
        choice = "brotli"
    name, _, param = choice.partition(":")
    if name == "brotli":
        return BrotliCompressor(int(param) if param else 2)
    if name == "zlib":
        return ZlibCompressor(int(param) if param else 6)
    raise ValueError(f"unknown compressor {choice!r}")


def _as_bytes_array(data) -> np.ndarray:
    if isinstance(data, (bytes, bytearray, memoryview)):
        return np.frombuffer(bytes(data), dtype=np.uint8)
    return np.ascontiguousarray(data, dtype=np.uint8).reshape(-1)


def shannon_entropy(data) -> float:
    """Entropy of the byte histogram, in bits per byte."""
    arr = _as_bytes_array(data)
    if arr.size == 0:
        raise ValueError("entropy of empty input")
    counts = np.bincount(arr, minlength=256)
    p = counts[counts > 0] / arr.size
    return float(max(0.0, -(p * np.log2(p)).sum()))


def high_order_entropy(data, compressor: str | Compressor | None = None) -> float:
    """Shannon entropy minus ``8 * compressed_size / n``. Can be negative."""
    arr = _as_bytes_array(data)
    if arr.size == 0:
        raise ValueError("entropy of empty input")
    comp = get_compressor(compressor)
    return shannon_entropy(arr) - 8.0 * comp.compressed_size(arr) / arr.size


class TracingDisabled(RuntimeError):
    pass


def token_stats(tokens) -> tuple[int, int]:
    """``(unique token count, total multiplicity of the 32 most common tokens)``."""
    if tokens is None:
        raise TracingDisabled("run was not traced")
    flat = np.asarray(tokens, dtype=np.uint64).reshape(-1)
    if flat.size == 0:
        return 0, 0
    _, counts = np.unique(flat, return_counts=True)
    top = np.partition(counts, counts.size - 32)[-32:] if counts.size > 32 else counts
    return int(counts.size), int(top.sum())


@dataclass
class EpochStats:
    epoch: int
    shannon_bits_per_byte: float
    compressed_size_bytes: int
    high_order_entropy: float
    unique_token_count: int | None
    top32_token_count: int | None
    zero_byte_count: int
    mean_steps_executed: float


STATS_COLUMNS = [f.name for f in fields(EpochStats)] + ["compressor"]


def measure(epoch: int, data, tokens=None, mean_steps: float = float("nan"),
            compressor: str | Compressor | None = None) -> EpochStats:
    arr = _as_bytes_array(data)
    comp = get_compressor(compressor)
    size = comp.compressed_size(arr)
    h = shannon_entropy(arr)
    unique = top32 = None
    if tokens is not None:
        unique, top32 = token_stats(tokens)
    return EpochStats(
        epoch=epoch,
        shannon_bits_per_byte=h,
        compressed_size_bytes=size,
        high_order_entropy=h - 8.0 * size / arr.size,
        unique_token_count=unique,
        top32_token_count=top32,
        zero_byte_count=int(np.count_nonzero(arr == 0)),
        mean_steps_executed=float(mean_steps),
    )


def detect_transition(series: Sequence[EpochStats] | Iterable[tuple[int, float]],
                      threshold: float = 1.0) -> int | None:
    """First epoch whose high-order entropy reaches ``threshold``, or ``None``.

    Accepts :class:`EpochStats` rows or ``(epoch, value)`` pairs, ordered by epoch.
    """
    for row in series:
        if isinstance(row, EpochStats):
            epoch, value = row.epoch, row.high_order_entropy
        else:
            epoch, value = row
        if value >= threshold:
            return int(epoch)
    return None


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_stats_csv(path, rows: Iterable, compressor: str, columns=None) -> None:
    """One row per dataclass record, plus the compressor identifier column."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(STATS_COLUMNS if columns is None else columns)
        for row in rows:
            w.writerow([_fmt(v) for v in astuple(row)] + [compressor])


def read_stats_csv(path) -> tuple[list[EpochStats], str | None]:
    rows, comp = [], None
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            comp = rec.pop("compressor")
            rows.append(EpochStats(
                epoch=int(rec["epoch"]),
                shannon_bits_per_byte=float(rec["shannon_bits_per_byte"]),
                compressed_size_bytes=int(rec["compressed_size_bytes"]),
                high_order_entropy=float(rec["high_order_entropy"]),
                unique_token_count=int(rec["unique_token_count"]) if rec["unique_token_count"] else None,
                top32_token_count=int(rec["top32_token_count"]) if rec["top32_token_count"] else None,
                zero_byte_count=int(rec["zero_byte_count"]),
                mean_steps_executed=float(rec["mean_steps_executed"]),
            ))
    return rows, comp

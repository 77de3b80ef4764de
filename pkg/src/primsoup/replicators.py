"""Known self-replicators, shipped as data files, and program-text parsing.

File formats, chosen by extension:

``.bf``   raw bytes, taken verbatim (spaces are no-ops in BFF)
``.hex``  whitespace-separated hex bytes
``.dec``  whitespace-separated signed decimals, as in SUBLEQ listings

In ``.hex`` and ``.dec`` files ``#`` starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .core import Language
from .subleq import assemble


@dataclass(frozen=True)
class Replicator:
    name: str
    language: Language
    filename: str
    start_pc: int = 0

    def code(self) -> np.ndarray:
        data = resources.files(__package__).joinpath("replicators", self.filename).read_bytes()
        return parse_program(data, Path(self.filename).suffix)


CORPUS = {
    r.name: r
    for r in [
        Replicator("bff-palindrome", Language.BFF, "bff-palindrome.bf"),
        Replicator("forth-soup-one-byte", Language.FORTH_SOUP, "forth-soup-one-byte.hex"),
        Replicator("forth-soup-six-byte", Language.FORTH_SOUP, "forth-soup-six-byte.hex"),
        Replicator("forth-soup-2d-inc", Language.FORTH_SOUP, "forth-soup-2d-inc.hex"),
        Replicator("forth-soup-2d-dec", Language.FORTH_SOUP, "forth-soup-2d-dec.hex"),
        Replicator("forth-soup-2d-short", Language.FORTH_SOUP, "forth-soup-2d-short.hex"),
        Replicator("forth-copy-short", Language.FORTH_COPY, "forth-copy-short.hex"),
        Replicator("rsubleq4-25", Language.RSUBLEQ4, "rsubleq4-25.dec"),
    ]
}


def get(name: str) -> Replicator:
    try:
        return CORPUS[name]
    except KeyError:
        raise KeyError(f"no replicator {name!r}; known: {sorted(CORPUS)}") from None


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def parse_hex(text: str) -> np.ndarray:
    """``"0C 08 04"`` or ``"0c0804"`` (whitespace optional) to bytes."""
    digits = "".join(_strip_comments(text).split())
    try:
        return np.frombuffer(bytes.fromhex(digits), dtype=np.uint8).copy()
    except ValueError as exc:
        raise ValueError(f"malformed hex program: {exc}") from None


def parse_program(data: bytes | str, fmt: str) -> np.ndarray:
    """Decode program text in format ``fmt`` (``.bf``/``bf``, ``hex``, ``dec``)."""
    fmt = fmt.lstrip(".")
    if fmt == "bf":
        raw = data.encode("latin-1") if isinstance(data, str) else data
        return np.frombuffer(raw, dtype=np.uint8).copy()
    text = data.decode("ascii") if isinstance(data, bytes) else data
    if fmt == "hex":
        return parse_hex(text)
    if fmt == "dec":
        return assemble(_strip_comments(text))
    raise ValueError(f"unknown program format {fmt!r}")


def load_program(source: str) -> np.ndarray:
    """Resolve a corpus name, a file path, or an inline hex string."""
    if source in CORPUS:
        return CORPUS[source].code()
    path = Path(source)
    try:
        is_file = path.is_file()
    except OSError:  # e.g. a long hex string is not a valid file name
        is_file = False
    if is_file:
        suffix = path.suffix.lstrip(".")
        return parse_program(path.read_bytes(), suffix if suffix in ("bf", "hex", "dec") else "bf")
    return parse_hex(source)

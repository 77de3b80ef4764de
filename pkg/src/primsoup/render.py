"""Grid snapshots as binary PPM (P6) images.

Each tape becomes an 8x8 pixel block, byte ``i`` of the tape at row
``i // 8``, column ``i % 8``. Tapes shorter than 64 bytes are padded with
zeros. Palette, fixed per language:

* byte 0 is black;
* the language's instruction bytes are spread evenly around the HSV hue
  wheel at full saturation and value, in opcode order;
* every other byte (a no-op) is grey, ``64 + v // 2`` on all channels.
"""

from __future__ import annotations

import colorsys
import re
from functools import lru_cache

import numpy as np

from .core import Language
from .snapshot import Snapshot, SnapshotError, Topology
from .vm import valid_opcodes

BLOCK = 8
_PPM_HEADER = re.compile(rb"P6\s+(\d+)\s+(\d+)\s+255\s")


@lru_cache(maxsize=None)
def palette(language) -> np.ndarray:
    """``(256, 3)`` uint8 colour table for ``language``."""
    lang = Language.parse(language)
    table = np.empty((256, 3), dtype=np.uint8)
    grey = 64 + np.arange(256) // 2
    table[:] = grey[:, None]
    ops = [int(v) for v in valid_opcodes(lang) if v != 0]
    for k, v in enumerate(ops):
        r, g, b = colorsys.hsv_to_rgb(k / len(ops), 1.0, 1.0)
        table[v] = (round(r * 255), round(g * 255), round(b * 255))
    table[0] = 0
    return table


def grid_image(programs: np.ndarray, width: int, height: int, language) -> np.ndarray:
    """RGB array of shape ``(height * 8, width * 8, 3)``."""
    programs = np.asarray(programs, dtype=np.uint8).reshape(width * height, -1)
    tlen = programs.shape[1]
    if tlen > BLOCK * BLOCK:
        raise ValueError(f"tapes of {tlen} bytes do not fit an 8x8 block")
    cells = np.zeros((width * height, BLOCK * BLOCK), dtype=np.uint8)
    cells[:, :tlen] = programs
    tiles = cells.reshape(height, width, BLOCK, BLOCK).transpose(0, 2, 1, 3)
    return palette(language)[tiles.reshape(height * BLOCK, width * BLOCK)]


def write_ppm(path, image: np.ndarray) -> None:
    h, w, _ = image.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(image, dtype=np.uint8).tobytes())


def read_ppm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    m = _PPM_HEADER.match(raw)
    if m is None:
        raise ValueError(f"{path}: not an 8-bit P6 image")
    w, h = int(m[1]), int(m[2])
    return np.frombuffer(raw, dtype=np.uint8, count=w * h * 3, offset=m.end()).reshape(h, w, 3)


def render_snapshot(snap: Snapshot, path) -> tuple[int, int]:
    """Render a grid snapshot; returns the image size ``(width, height)`` in pixels."""
    if snap.topology is not Topology.GRID2D:
        raise SnapshotError(f"render needs a grid2d snapshot, got {snap.topology.cli_name}")
    img = grid_image(snap.programs(), snap.width, snap.height, snap.language)
    write_ppm(path, img)
    return img.shape[1], img.shape[0]

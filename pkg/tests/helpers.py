from pathlib import Path

import numpy as np

from primsoup.bff import BffState, bff_step
from primsoup.cli import _glyph_row
from primsoup.replicators import get

DATA = Path(__file__).parent / "data"


def palindrome_view() -> np.ndarray:
    tape = np.zeros(128, dtype=np.uint8)
    tape[:64] = get("bff-palindrome").code()
    return tape


def trace_rows():
    """``(row, pc, head0, head1, glyphs)`` records of the reference palindrome execution."""
    out = []
    for line in (DATA / "bff_palindrome_trace.txt").read_text().splitlines():
        if line.startswith("#"):
            continue
        head, glyphs = line.split(" |", 1)
        row, pc, h0, h1 = (int(v) for v in head.split())
        out.append((row, pc, h0, h1, glyphs.rstrip("|")))
    return out


def replay_rows(rows):
    """Step the palindrome view and return mismatches against ``rows``."""
    tape = palindrome_view()
    state = BffState()
    step = 1
    bad = []
    for row, pc, h0, h1, glyphs in rows:
        while step < row:
            assert bff_step(state, tape) is None
            step += 1
        got = (state.pc, state.head0, state.head1, _glyph_row(tape))
        if got != (pc, h0, h1, glyphs):
            bad.append((row, got[:3], (pc, h0, h1)))
    return bad


def random_tapes(rng, n, length=128):
    return rng.integers(0, 256, size=(n, length), dtype=np.uint8)

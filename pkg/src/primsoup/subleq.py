"""SUBLEQ and RSUBLEQ4: single-instruction subtract-and-branch machines.

Operands are signed bytes. SUBLEQ addresses are absolute within the
execution view; RSUBLEQ4 addresses are relative to the program counter.
Any operand fetch, cell access or jump that would leave the tape halts the
machine with ``PC_OUT_OF_BOUNDS``; there is no other way to stop short of
the step budget.

For RSUBLEQ4 the branch tests the cell that was just written, ``*(pc + a)``.
"""

from __future__ import annotations

import numba
import numpy as np

from .core import CHAR_CLEAR_MASK, HaltReason

_PC_OOB = int(HaltReason.PC_OUT_OF_BOUNDS)
_BUDGET = int(HaltReason.BUDGET_EXHAUSTED)

PC = 0
STATE_SIZE = 1


@numba.njit(cache=True, nogil=True, inline="always")
def _s8(v):
    v = np.int64(v)
    return v - 256 if v >= 128 else v


@numba.njit(cache=True, nogil=True)
def subleq_run(tape, tokens, trace, st, budget):
    L = tape.size
    pc = st[PC]
    steps = 0
    reason = _BUDGET
    while True:
        if pc < 0 or pc + 2 >= L:
            reason = _PC_OOB
            break
        if steps >= budget:
            break
        steps += 1
        a = _s8(tape[pc])
        b = _s8(tape[pc + 1])
        c = _s8(tape[pc + 2])
        if a < 0 or a >= L or b < 0 or b >= L:
            reason = _PC_OOB
            break
        v = (np.int64(tape[a]) - np.int64(tape[b])) & 0xFF
        tape[a] = v
        if trace:
            tokens[a] = (tokens[a] & CHAR_CLEAR_MASK) | np.uint64(v)
        pc = c if v == 0 or v >= 128 else pc + 3
    st[PC] = pc
    return steps, reason


@numba.njit(cache=True, nogil=True)
def rsubleq4_run(tape, tokens, trace, st, budget):
    L = tape.size
    pc = st[PC]
    steps = 0
    reason = _BUDGET
    while True:
        if pc < 0 or pc + 3 >= L:
            reason = _PC_OOB
            break
        if steps >= budget:
            break
        steps += 1
        a = pc + _s8(tape[pc])
        b = pc + _s8(tape[pc + 1])
        c = pc + _s8(tape[pc + 2])
        d = _s8(tape[pc + 3])
        if a < 0 or a >= L or b < 0 or b >= L or c < 0 or c >= L:
            reason = _PC_OOB
            break
        v = (np.int64(tape[b]) - np.int64(tape[c])) & 0xFF
        tape[a] = v
        if trace:
            tokens[a] = (tokens[a] & CHAR_CLEAR_MASK) | np.uint64(v)
        # the branch tests the freshly written cell as a signed byte; d was read before the write
        pc = pc + d if v == 0 or v >= 128 else pc + 4
    st[PC] = pc
    return steps, reason


_NO_TOKENS = np.empty(0, dtype=np.uint64)


def _one(run_fn, width, pc, tape, tokens):
    if pc < 0 or pc + width - 1 >= tape.size:
        return pc, HaltReason.PC_OUT_OF_BOUNDS
    st = np.array([pc], dtype=np.int64)
    _, r = run_fn(tape, _NO_TOKENS if tokens is None else tokens, tokens is not None, st, 1)
    return int(st[PC]), (None if r == _BUDGET else HaltReason(r))


def subleq_step(pc: int, tape: np.ndarray, tokens=None):
    """One SUBLEQ instruction in place. Returns ``(new_pc, halt_reason_or_None)``."""
    return _one(subleq_run, 3, pc, tape, tokens)


def rsubleq4_step(pc: int, tape: np.ndarray, tokens=None):
    """One RSUBLEQ4 instruction in place. Returns ``(new_pc, halt_reason_or_None)``."""
    return _one(rsubleq4_run, 4, pc, tape, tokens)


def assemble(text: str) -> np.ndarray:
    """Parse a whitespace-separated list of signed decimals into tape bytes."""
    try:
        values = [int(tok) for tok in text.split()]
    except ValueError as exc:
        raise ValueError(f"malformed listing: {exc}") from None
    bad = [v for v in values if not -128 <= v <= 255]
    if bad:
        raise ValueError(f"values out of byte range: {bad}")
    return np.array([v & 0xFF for v in values], dtype=np.uint8)


def disassemble(code) -> str:
    arr = np.asarray(code, dtype=np.uint8).astype(np.int64)
    return " ".join(str(v - 256 if v >= 128 else v) for v in arr)

"""Extended Brainfuck (BFF): code and data share one tape, I/O replaced by head-to-head copies.

Instruction bytes are ASCII ``< > { } - + . , [ ]``; every other byte is a
no-op and byte 0 is the value that exits loops. ``head0`` and ``head1`` wrap
around the tape, the program counter does not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .core import CHAR_CLEAR_MASK, HaltReason

COMMANDS = b"<>{}-+.,[]"

_LT, _GT, _LBRACE, _RBRACE = ord("<"), ord(">"), ord("{"), ord("}")
_MINUS, _PLUS, _DOT, _COMMA = ord("-"), ord("+"), ord("."), ord(",")
_OPEN, _CLOSE = ord("["), ord("]")

_PC_OOB = int(HaltReason.PC_OUT_OF_BOUNDS)
_UNMATCHED = int(HaltReason.UNMATCHED_BRACKET)
_BUDGET = int(HaltReason.BUDGET_EXHAUSTED)

# state vector layout
PC, HEAD0, HEAD1 = 0, 1, 2
STATE_SIZE = 3


@numba.njit(cache=True, nogil=True)
def match_forward(tape, pos):
    """Index of the ``]`` matching the ``[`` at ``pos``, or -1."""
    depth = 1
    for j in range(pos + 1, tape.size):
        c = tape[j]
        if c == _OPEN:
            depth += 1
        elif c == _CLOSE:
            depth -= 1
            if depth == 0:
                return j
    return -1


@numba.njit(cache=True, nogil=True)
def match_backward(tape, pos):
    """Index of the ``[`` matching the ``]`` at ``pos``, or -1."""
    depth = 1
    for j in range(pos - 1, -1, -1):
        c = tape[j]
        if c == _CLOSE:
            depth += 1
        elif c == _OPEN:
            depth -= 1
            if depth == 0:
                return j
    return -1


@numba.njit(cache=True, nogil=True)
def run(tape, tokens, trace, st, budget):
    """Run from the state in ``st`` (pc, head0, head1); writes the final state back."""
    L = tape.size
    pc = st[PC]
    h0 = st[HEAD0]
    h1 = st[HEAD1]
    steps = 0
    reason = _BUDGET
    while True:
        if pc < 0 or pc >= L:
            reason = _PC_OOB
            break
        if steps >= budget:
            break
        steps += 1
        c = tape[pc]
        if c == _LT:
            h0 = h0 - 1 if h0 > 0 else L - 1
        elif c == _GT:
            h0 = h0 + 1 if h0 < L - 1 else 0
        elif c == _LBRACE:
            h1 = h1 - 1 if h1 > 0 else L - 1
        elif c == _RBRACE:
            h1 = h1 + 1 if h1 < L - 1 else 0
        elif c == _MINUS or c == _PLUS:
            v = (np.int64(tape[h0]) + (1 if c == _PLUS else -1)) & 0xFF
            tape[h0] = v
            if trace:
                tokens[h0] = (tokens[h0] & CHAR_CLEAR_MASK) | np.uint64(v)
        elif c == _DOT:
            tape[h1] = tape[h0]
            if trace:
                tokens[h1] = tokens[h0]
        elif c == _COMMA:
            tape[h0] = tape[h1]
            if trace:
                tokens[h0] = tokens[h1]
        elif c == _OPEN:
            if tape[h0] == 0:
                j = match_forward(tape, pc)
                if j < 0:
                    reason = _UNMATCHED
                    break
                pc = j
        elif c == _CLOSE:
            if tape[h0] != 0:
                j = match_backward(tape, pc)
                if j < 0:
                    reason = _UNMATCHED
                    break
                pc = j
        pc += 1
    st[PC] = pc
    st[HEAD0] = h0
    st[HEAD1] = h1
    return steps, reason


@dataclass
class BffState:
    pc: int = 0
    head0: int = 0
    head1: int = 0

    def to_array(self) -> np.ndarray:
        return np.array([self.pc, self.head0, self.head1], dtype=np.int64)

    def load(self, st: np.ndarray) -> None:
        self.pc, self.head0, self.head1 = (int(x) for x in st[:STATE_SIZE])


def bff_step(state: BffState, tape: np.ndarray, tokens: np.ndarray | None = None):
    """Execute one instruction in place. Returns ``None`` or the :class:`HaltReason`.

    The result describes the machine after the step: a step that moves pc
    off the tape reports ``PC_OUT_OF_BOUNDS``. A pc already outside the tape
    halts without fetching.
    """
    if not 0 <= state.pc < tape.size:
        return HaltReason.PC_OUT_OF_BOUNDS
    st = state.to_array()
    trace = tokens is not None
    _, r = run(tape, tokens if trace else _NO_TOKENS, trace, st, 1)
    state.load(st)
    return None if r == _BUDGET else HaltReason(r)


_NO_TOKENS = np.empty(0, dtype=np.uint64)

"""Stack-machine substrates.

``forth-soup`` runs on a concatenated pair of tapes and addresses either half
through the value on top of the stack. Its stack is a circular buffer of 64
zero-initialised byte cells, so it never faults; popping an empty stack just
rotates onto a zero cell, which is what makes ``0C`` alone a one-byte
replicator.

``forth-copy`` is the long-tape variant: a bounded stack of signed 32-bit
words where overflow and underflow are the only faults. Its relative
addresses are taken from the instruction after the current one, and every
address (program counter included) wraps around the tape.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .core import CHAR_CLEAR_MASK, HaltReason

STACK_CELLS = 64

_PC_OOB = int(HaltReason.PC_OUT_OF_BOUNDS)
_BUDGET = int(HaltReason.BUDGET_EXHAUSTED)
_UNDERFLOW = int(HaltReason.STACK_UNDERFLOW)
_OVERFLOW = int(HaltReason.STACK_OVERFLOW)

# state vector: pc, stack pointer (soup) or depth (copy), then the cells
PC, SP = 0, 1
CELLS = 2
STATE_SIZE = CELLS + STACK_CELLS


# --------------------------------------------------------------- forth-soup


@numba.njit(cache=True, nogil=True)
def soup_run(tape, tokens, trace, st, budget):
    """Run from ``st`` (pc, sp, 64 cells); writes the final state back."""
    L = tape.size
    half = L // 2
    pow2 = (half & (half - 1)) == 0
    cells = st[CELLS:]
    pc = st[PC]
    sp = st[SP]
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
        if c >= 0x80:
            n = (c & 0x3F) + 1
            pc = pc - n if c & 0x40 else pc + n
            continue
        t = (sp - 1) & 63
        if c >= 0x40:
            cells[sp] = c & 0x3F
            sp = (sp + 1) & 63
        elif c == 0x00 or c == 0x01:
            a = cells[t] & (half - 1) if pow2 else cells[t] % half
            cells[t] = tape[a + half if c == 0x01 else a]
        elif c == 0x02 or c == 0x03:
            a = cells[t] & (half - 1) if pow2 else cells[t] % half
            if c == 0x03:
                a += half
            v = cells[(sp - 2) & 63] & 0xFF
            tape[a] = v
            if trace:
                tokens[a] = (tokens[a] & CHAR_CLEAR_MASK) | np.uint64(v)
            sp = (sp - 2) & 63
        elif c == 0x04:
            cells[sp] = cells[t]
            sp = (sp + 1) & 63
        elif c == 0x05:
            sp = t
        elif c == 0x06:
            t1 = (sp - 2) & 63
            tmp = cells[t]
            cells[t] = cells[t1]
            cells[t1] = tmp
        elif c == 0x07:
            if cells[t] != 0:
                pc += 1
        elif c == 0x08:
            cells[t] = (cells[t] + 1) & 0xFF
        elif c == 0x09:
            cells[t] = (cells[t] - 1) & 0xFF
        elif c == 0x0A:
            t1 = (sp - 2) & 63
            cells[t1] = (cells[t] + cells[t1]) & 0xFF
            sp = t
        elif c == 0x0B:
            t1 = (sp - 2) & 63
            cells[t1] = (cells[t] - cells[t1]) & 0xFF
            sp = t
        elif c == 0x0C or c == 0x0D:
            lo = cells[t] & (half - 1) if pow2 else cells[t] % half
            hi = lo + half
            if c == 0x0C:
                src, dst = lo, hi
            else:
                src, dst = hi, lo
            tape[dst] = tape[src]
            if trace:
                tokens[dst] = tokens[src]
            sp = t
        pc += 1
    st[PC] = pc
    st[SP] = sp
    return steps, reason


# --------------------------------------------------------------- forth-copy


@numba.njit(cache=True, nogil=True, inline="always")
def _wrap32(x):
    return ((x + 0x80000000) & 0xFFFFFFFF) - 0x80000000


@numba.njit(cache=True, nogil=True)
def copy_run(tape, tokens, trace, st, budget):
    """Run from ``st`` (pc, depth, 64 cells); writes the final state back."""
    L = tape.size
    pow2 = (L & (L - 1)) == 0
    cells = st[CELLS:]
    pc = st[PC] % L
    depth = st[SP]
    steps = 0
    reason = _BUDGET
    while steps < budget:
        steps += 1
        c = tape[pc]
        nxt = pc + 1
        if c < 0x10:
            if depth >= STACK_CELLS:
                reason = _OVERFLOW
                break
            cells[depth] = c - 16 if c & 0x08 else c
            depth += 1
        elif c < 0x20:
            if depth < 1:
                reason = _UNDERFLOW
                break
            nib = (c & 0x0F) - 16 if c & 0x08 else c & 0x0F
            cells[depth - 1] = _wrap32((cells[depth - 1] << 4) + nib)
        elif c == 0x20:
            if depth < 2:
                reason = _UNDERFLOW
                break
            base = nxt + cells[depth - 2]
            dst = base + cells[depth - 1]
            if pow2:
                base &= L - 1
                dst &= L - 1
            else:
                base %= L
                dst %= L
            tape[dst] = tape[base]
            if trace:
                tokens[dst] = tokens[base]
            depth -= 1
        elif c == 0x21 or c == 0x22:
            if depth < 1:
                reason = _UNDERFLOW
                break
            cells[depth - 1] = _wrap32(cells[depth - 1] + (1 if c == 0x21 else -1))
        elif c == 0x23:
            if depth < 2:
                reason = _UNDERFLOW
                break
            if cells[depth - 1] != 0:
                nxt += cells[depth - 2]
            depth -= 2
        pc = nxt & (L - 1) if pow2 else nxt % L
    st[PC] = pc
    st[SP] = depth
    return steps, reason


# ------------------------------------------------------------ python surface


@dataclass
class SoupStack:
    cells: np.ndarray = field(default_factory=lambda: np.zeros(STACK_CELLS, np.int64))
    sp: int = 0

    @property
    def top(self) -> int:
        return int(self.cells[(self.sp - 1) % STACK_CELLS])


@dataclass
class CopyStack:
    cells: np.ndarray = field(default_factory=lambda: np.zeros(STACK_CELLS, np.int64))
    depth: int = 0

    @property
    def values(self) -> list[int]:
        return [int(x) for x in self.cells[: self.depth]]


def _state(pc, stack) -> np.ndarray:
    st = np.zeros(STATE_SIZE, dtype=np.int64)
    st[PC] = pc
    st[SP] = stack.sp if isinstance(stack, SoupStack) else stack.depth
    st[CELLS:] = stack.cells
    return st


def _unload(st, stack) -> int:
    stack.cells[:] = st[CELLS:]
    if isinstance(stack, SoupStack):
        stack.sp = int(st[SP])
    else:
        stack.depth = int(st[SP])
    return int(st[PC])


_NO_TOKENS = np.empty(0, dtype=np.uint64)


def forth_soup_step(stack: SoupStack, pc: int, tape: np.ndarray, tokens=None):
    """One forth-soup instruction. Returns ``(new_pc, halt_reason_or_None)``."""
    if not 0 <= pc < tape.size:
        return pc, HaltReason.PC_OUT_OF_BOUNDS
    st = _state(pc, stack)
    _, r = soup_run(tape, _NO_TOKENS if tokens is None else tokens, tokens is not None, st, 1)
    return _unload(st, stack), (None if r == _BUDGET else HaltReason(r))


def forth_copy_step(stack: CopyStack, pc: int, tape: np.ndarray, tokens=None):
    """One forth-copy instruction. Returns ``(new_pc, halt_reason_or_None)``."""
    st = _state(pc % tape.size, stack)
    _, r = copy_run(tape, _NO_TOKENS if tokens is None else tokens, tokens is not None, st, 1)
    new_pc = _unload(st, stack)
    return new_pc, (None if r == _BUDGET else HaltReason(r))


# ------------------------------------------------------------- disassembly


def soup_mnemonic(byte: int) -> str:
    byte &= 0xFF
    if byte >= 0x80:
        n = (byte & 0x3F) + 1
        return f"JUMP {'-' if byte & 0x40 else '+'}{n}"
    if byte >= 0x40:
        return f"PUSH {byte & 0x3F}"
    return _SOUP_NAMES.get(byte, "NOP")


_SOUP_NAMES = {
    0x00: "READ",
    0x01: "READ+64",
    0x02: "WRITE",
    0x03: "WRITE+64",
    0x04: "DUP",
    0x05: "POP",
    0x06: "SWAP",
    0x07: "SKIPNZ",
    0x08: "INC",
    0x09: "DEC",
    0x0A: "ADD",
    0x0B: "SUB",
    0x0C: "COPY+64",
    0x0D: "COPY-64",
}


def copy_mnemonic(byte: int) -> str:
    byte &= 0xFF
    if byte < 0x20:
        nib = byte & 0x0F
        val = nib - 16 if nib & 0x08 else nib
        return f"{'PUSH' if byte < 0x10 else 'SHIFT'} {val}"
    return {0x20: "COPY", 0x21: "INC", 0x22: "DEC", 0x23: "JNZ"}.get(byte, "NOP")


def disassemble(code, variant: str = "forth-soup") -> list[str]:
    names = soup_mnemonic if variant == "forth-soup" else copy_mnemonic
    return [names(b) for b in bytes(bytearray(np.asarray(code, dtype=np.uint8)))]

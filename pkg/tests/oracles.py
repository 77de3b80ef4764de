"""Slow, obviously-correct reference interpreters used as test oracles.

Written directly from the instruction tables with plain Python lists and
explicit bounds assertions, sharing no code with the package kernels.
Each returns ``(steps, reason_name)`` and mutates ``tape``/``tokens`` lists.
"""

import numpy as np

CHAR_MASK = 0xFFFF_FFFF_FFFF_FF00


def _s8(v):
    return v - 256 if v >= 128 else v


class Tape:
    """List wrapper that refuses any out-of-range access."""

    def __init__(self, data):
        self.data = list(data)

    def __len__(self):
        return len(self.data)

    def __getitem__(self, i):
        assert 0 <= i < len(self.data), f"read out of bounds at {i}"
        return self.data[i]

    def __setitem__(self, i, v):
        assert 0 <= i < len(self.data), f"write out of bounds at {i}"
        self.data[i] = v


def _retoken(tokens, i, v):
    if tokens is not None:
        tokens[i] = (tokens[i] & CHAR_MASK) | v


def bff(tape, tokens=None, budget=8192, pc=0, h0=0, h1=0):
    L = len(tape)
    steps = 0
    while True:
        if not 0 <= pc < L:
            return steps, "PC_OUT_OF_BOUNDS"
        if steps == budget:
            return steps, "BUDGET_EXHAUSTED"
        steps += 1
        c = chr(tape[pc])
        if c == "<":
            h0 = (h0 - 1) % L
        elif c == ">":
            h0 = (h0 + 1) % L
        elif c == "{":
            h1 = (h1 - 1) % L
        elif c == "}":
            h1 = (h1 + 1) % L
        elif c in "+-":
            tape[h0] = (tape[h0] + (1 if c == "+" else -1)) % 256
            _retoken(tokens, h0, tape[h0])
        elif c == ".":
            tape[h1] = tape[h0]
            if tokens is not None:
                tokens[h1] = tokens[h0]
        elif c == ",":
            tape[h0] = tape[h1]
            if tokens is not None:
                tokens[h0] = tokens[h1]
        elif c == "[" and tape[h0] == 0:
            depth, j = 0, pc
            while True:
                if j >= L:
                    return steps, "UNMATCHED_BRACKET"
                depth += {"[": 1, "]": -1}.get(chr(tape[j]), 0)
                if depth == 0:
                    break
                j += 1
            pc = j
        elif c == "]" and tape[h0] != 0:
            depth, j = 0, pc
            while True:
                if j < 0:
                    return steps, "UNMATCHED_BRACKET"
                depth += {"]": 1, "[": -1}.get(chr(tape[j]), 0)
                if depth == 0:
                    break
                j -= 1
            pc = j
        pc += 1


def forth_soup(tape, tokens=None, budget=8192, pc=0):
    L = len(tape)
    half = L // 2
    stack = [0] * 64
    sp = 0

    def top(k=0):
        return stack[(sp - 1 - k) % 64]

    steps = 0
    while True:
        if not 0 <= pc < L:
            return steps, "PC_OUT_OF_BOUNDS"
        if steps == budget:
            return steps, "BUDGET_EXHAUSTED"
        steps += 1
        c = tape[pc]
        if c >= 0x80:
            n = (c & 0x3F) + 1
            pc += -n if c & 0x40 else n
            continue
        t = (sp - 1) % 64
        if c >= 0x40:
            stack[sp] = c & 0x3F
            sp = (sp + 1) % 64
        elif c in (0x00, 0x01):
            stack[t] = tape[top() % half + (half if c == 0x01 else 0)]
        elif c in (0x02, 0x03):
            a = top() % half + (half if c == 0x03 else 0)
            tape[a] = top(1) % 256
            _retoken(tokens, a, tape[a])
            sp = (sp - 2) % 64
        elif c == 0x04:
            v = top()
            stack[sp] = v
            sp = (sp + 1) % 64
        elif c == 0x05:
            sp = t
        elif c == 0x06:
            u = (sp - 2) % 64
            stack[t], stack[u] = stack[u], stack[t]
        elif c == 0x07:
            if top() != 0:
                pc += 1
        elif c == 0x08:
            stack[t] = (top() + 1) % 256
        elif c == 0x09:
            stack[t] = (top() - 1) % 256
        elif c in (0x0A, 0x0B):
            u = (sp - 2) % 64
            stack[u] = (top() + top(1)) % 256 if c == 0x0A else (top() - top(1)) % 256
            sp = t
        elif c in (0x0C, 0x0D):
            lo = top() % half
            src, dst = (lo, lo + half) if c == 0x0C else (lo + half, lo)
            tape[dst] = tape[src]
            if tokens is not None:
                tokens[dst] = tokens[src]
            sp = t
        pc += 1


def _i32(x):
    return (x + 2**31) % 2**32 - 2**31


def forth_copy(tape, tokens=None, budget=1000, pc=0):
    L = len(tape)
    stack = []
    pc %= L
    steps = 0
    while steps < budget:
        steps += 1
        c = tape[pc]
        nxt = pc + 1
        if c < 0x10:
            if len(stack) == 64:
                return steps, "STACK_OVERFLOW"
            stack.append(c - 16 if c >= 8 else c)
        elif c < 0x20:
            if not stack:
                return steps, "STACK_UNDERFLOW"
            nib = c & 0xF
            stack[-1] = _i32(stack[-1] * 16 + (nib - 16 if nib >= 8 else nib))
        elif c == 0x20:
            if len(stack) < 2:
                return steps, "STACK_UNDERFLOW"
            src = (nxt + stack[-2]) % L
            dst = (nxt + stack[-2] + stack[-1]) % L
            tape[dst] = tape[src]
            if tokens is not None:
                tokens[dst] = tokens[src]
            stack.pop()
        elif c in (0x21, 0x22):
            if not stack:
                return steps, "STACK_UNDERFLOW"
            stack[-1] = _i32(stack[-1] + (1 if c == 0x21 else -1))
        elif c == 0x23:
            if len(stack) < 2:
                return steps, "STACK_UNDERFLOW"
            if stack[-1] != 0:
                nxt += stack[-2]
            del stack[-2:]
        pc = nxt % L
    return steps, "BUDGET_EXHAUSTED"


def subleq(tape, tokens=None, budget=8192, pc=0):
    L = len(tape)
    steps = 0
    while True:
        if not (0 <= pc and pc + 2 < L):
            return steps, "PC_OUT_OF_BOUNDS"
        if steps == budget:
            return steps, "BUDGET_EXHAUSTED"
        steps += 1
        a, b, c = (_s8(tape[pc + k]) for k in range(3))
        if not (0 <= a < L and 0 <= b < L):
            return steps, "PC_OUT_OF_BOUNDS"
        v = (tape[a] - tape[b]) % 256
        tape[a] = v
        _retoken(tokens, a, v)
        pc = c if _s8(v) <= 0 else pc + 3


def rsubleq4(tape, tokens=None, budget=8192, pc=0):
    L = len(tape)
    steps = 0
    while True:
        if not (0 <= pc and pc + 3 < L):
            return steps, "PC_OUT_OF_BOUNDS"
        if steps == budget:
            return steps, "BUDGET_EXHAUSTED"
        steps += 1
        a, b, c, d = (_s8(tape[pc + k]) for k in range(4))
        if not all(0 <= pc + x < L for x in (a, b, c)):
            return steps, "PC_OUT_OF_BOUNDS"
        v = (tape[pc + b] - tape[pc + c]) % 256
        tape[pc + a] = v
        _retoken(tokens, pc + a, v)
        pc = pc + d if _s8(v) <= 0 else pc + 4


ORACLES = {
    "bff": bff,
    "forth-soup": forth_soup,
    "forth-copy": forth_copy,
    "subleq": subleq,
    "rsubleq4": rsubleq4,
}


def run(language, data, tokens=None, budget=None, pc=0):
    """Run an oracle on a copy; returns ``(bytes, tokens, steps, reason)``."""
    tape = Tape(bytes(np.asarray(data, dtype=np.uint8)) if not isinstance(data, bytes) else data)
    toks = None if tokens is None else list(int(t) for t in tokens)
    fn = ORACLES[language]
    kw = {} if budget is None else {"budget": budget}
    steps, reason = fn(tape, toks, pc=pc, **kw)
    return bytes(tape.data), toks, steps, reason

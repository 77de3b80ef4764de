"""Language-agnostic execution entry points."""

from __future__ import annotations

import numba
import numpy as np

from . import bff, forth, subleq
from .core import ExecReport, HaltReason, Language

STATE_SIZE = max(bff.STATE_SIZE, forth.STATE_SIZE, subleq.STATE_SIZE)

_BFF = int(Language.BFF)
_FSOUP = int(Language.FORTH_SOUP)
_FCOPY = int(Language.FORTH_COPY)
_SUBLEQ = int(Language.SUBLEQ)
_RSUBLEQ4 = int(Language.RSUBLEQ4)


@numba.njit(cache=True, nogil=True)
def run_lang(lang, tape, tokens, trace, st, budget):
    """Run until halt or budget. ``st`` must be a zeroed state vector with pc set."""
    if lang == _BFF:
        return bff.run(tape, tokens, trace, st, budget)
    if lang == _FSOUP:
        return forth.soup_run(tape, tokens, trace, st, budget)
    if lang == _FCOPY:
        return forth.copy_run(tape, tokens, trace, st, budget)
    if lang == _SUBLEQ:
        return subleq.subleq_run(tape, tokens, trace, st, budget)
    return subleq.rsubleq4_run(tape, tokens, trace, st, budget)


@numba.njit(cache=True, nogil=True)
def run_pairs(programs, tokens, trace, pairs, lang, budget, steps_out, halt_out):
    """Concatenate-execute-split each ``(first, second)`` row of ``pairs`` in place."""
    T = programs.shape[1]
    buf = np.empty(2 * T, dtype=np.uint8)
    tbuf = np.empty(2 * T if trace else 0, dtype=np.uint64)
    st = np.zeros(STATE_SIZE, dtype=np.int64)
    for k in range(pairs.shape[0]):
        a = pairs[k, 0]
        b = pairs[k, 1]
        buf[:T] = programs[a]
        buf[T:] = programs[b]
        if trace:
            tbuf[:T] = tokens[a]
            tbuf[T:] = tokens[b]
        st[:] = 0
        steps, reason = run_lang(lang, buf, tbuf, trace, st, budget)
        steps_out[k] = steps
        halt_out[k] = reason
        programs[a] = buf[:T]
        programs[b] = buf[T:]
        if trace:
            tokens[a] = tbuf[:T]
            tokens[b] = tbuf[T:]


_NO_TOKENS = np.empty(0, dtype=np.uint64)


def initial_state(language: Language, start_pc: int = 0, head0: int | None = None,
                  head1: int | None = None) -> np.ndarray:
    st = np.zeros(STATE_SIZE, dtype=np.int64)
    st[0] = start_pc
    if Language.parse(language) is Language.BFF:
        st[bff.HEAD0] = 0 if head0 is None else head0
        st[bff.HEAD1] = 0 if head1 is None else head1
    return st


def execute(language, tape: np.ndarray, tokens: np.ndarray | None = None,
            budget: int | None = None, start_pc: int = 0,
            head0: int | None = None, head1: int | None = None) -> ExecReport:
    """Run ``tape`` in place from ``start_pc`` and report why execution stopped.

    ``tokens``, when given, is a uint64 array parallel to ``tape`` and is
    updated alongside it. BFF heads default to 0.
    """
    lang = Language.parse(language)
    if tape.dtype != np.uint8 or tape.ndim != 1:
        raise TypeError("tape must be a 1-D uint8 array")
    if tokens is not None and tokens.shape != tape.shape:
        raise ValueError("tokens must parallel the tape")
    if budget is None:
        budget = lang.default_budget
    if budget < 0:
        raise ValueError("budget must be >= 0")
    st = initial_state(lang, start_pc, head0, head1)
    trace = tokens is not None
    steps, reason = run_lang(int(lang), tape, tokens if trace else _NO_TOKENS, trace, st, budget)
    return ExecReport(int(steps), HaltReason(reason))


# Bytes that do something in each language; long-tape mutations draw from these.
def valid_opcodes(language) -> np.ndarray:
    lang = Language.parse(language)
    if lang is Language.BFF:
        ops = sorted(bff.COMMANDS)
    elif lang is Language.FORTH_SOUP:
        ops = list(range(0x0E)) + list(range(0x40, 0x100))
    elif lang is Language.FORTH_COPY:
        ops = list(range(0x24))
    else:
        ops = list(range(256))
    return np.array(ops, dtype=np.uint8)

"""
Watching known replicators copy themselves
==========================================

Each language ships a few hand-checked self-replicators. Here we run them
on a 128-byte view (program in the first half, zeros in the second) and
look at what lands in the second half.
"""

import numpy as np

from primsoup.cli import hexdump, trace_execution
from primsoup.replicators import CORPUS
from primsoup.vm import execute

# The BFF palindrome: two copy loops around a run of spaces. The trace shows
# the tape before each fetch, with ^ marking pc, r the read head and w the
# write head.
rep = CORPUS["bff-palindrome"]
tape = np.zeros(128, dtype=np.uint8)
tape[:64] = rep.code()
trace_execution("bff", tape, budget=8192, rows=6)
print(hexdump(tape[64:]))

# Forth soup: one byte, 0C, copies tape[top] to tape[top + 64]. On an empty
# stack top is 0, so the byte copies itself.
tape = np.zeros(128, dtype=np.uint8)
tape[0] = 0x0C
execute("forth-soup", tape, budget=1)
print("\nforth-soup 0C ->", hex(tape[64]))

# Every corpus entry, run to completion from its start pc.
print()
for name, rep in CORPUS.items():
    code = rep.code()
    tape = np.zeros(max(128, 2 * code.size), dtype=np.uint8)
    tape[: code.size] = code
    report = execute(rep.language, tape, start_pc=rep.start_pc)
    half = tape.size // 2
    same = int((tape[half: half + code.size] == code).sum())
    print(f"{name:<22} {report.halt_reason.name:<18} {report.steps_executed:>5} steps, "
          f"{same}/{code.size} bytes reproduced at offset {half}")

# forth-copy's replicator copies right after itself rather than into a
# second half, which is why the line above reports 0 for it.
tape = np.zeros(64, dtype=np.uint8)
tape[:7] = CORPUS["forth-copy-short"].code()
execute("forth-copy", tape, budget=200)
print("\nforth-copy-short after 200 fetches:")
print(hexdump(tape[:32]))

"""Command line: ``primsoup run | exec | render2d | replicators``.

Exit status is 0 on success, 1 for usage or configuration errors and 2 for
failures while running.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import MISSING, fields

import numpy as np

from . import snapshot
from .config import ConfigError, RunConfig
from .core import LANGUAGE_NAMES, HaltReason, Language
from .experiment import run_experiment
from .forth import copy_mnemonic, soup_mnemonic
from .render import render_snapshot
from .replicators import CORPUS, load_program
from .vm import STATE_SIZE, run_lang

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------------ run

_ALIASES = {
    "language": ["--lang", "--language"],
    "output_dir": ["-o", "--output", "--output-dir"],
    "transition_threshold": ["--threshold", "--transition-threshold"],
}
_OPTIONAL_TYPES = {"budget": int, "output_dir": str, "seed_replicator": str}
_HELP = {
    "topology": "well-mixed, grid2d or longtape",
    "num_programs": "soup size (well-mixed)",
    "tape_len": "bytes per program",
    "epochs": "epochs, or generations for a long tape",
    "budget": "instructions per interaction (default: language default)",
    "mutation_rate": "per-byte mutation probability per epoch",
    "trace": "attach lineage tokens to every byte",
    "stats_every": "sample statistics every N epochs",
    "dense_every": "finer cadence once entropy reaches --dense-threshold (0 = off)",
    "dense_threshold": "entropy that switches on dense sampling",
    "snapshot_every": "write a snapshot every N epochs (0 = final only)",
    "output_dir": "directory for stats.csv, config.json and snapshots/",
    "seed_replicator": "corpus name, program file or hex string to plant",
    "seed_placement": "'random' or a tape index / long-tape offset",
    "fixed_shuffle": "use the same pairings for every seed",
    "workers": "threads; results do not depend on this",
    "stop_on_transition": "stop at the first sample reaching the threshold",
    "transition_threshold": "high-order entropy marking a transition",
    "compressor": "brotli[:quality] or zlib[:level]",
    "torus": "wrap grid neighbourhoods at the edges",
    "long_tape_len": "long-tape size in bytes",
    "windows_per_generation": "execution windows per long-tape generation",
    "mutation_interval": "executed instructions between long-tape mutations",
    "head1_offset": "BFF long tape: write head offset from the start position",
}


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    for f in fields(RunConfig):
        names = _ALIASES.get(f.name, ["--" + f.name.replace("_", "-")])
        default = f.default if f.default is not MISSING else None
        if isinstance(default, bool):
            p.add_argument(*names, dest=f.name, action=argparse.BooleanOptionalAction, default=None,
                           help=_HELP.get(f.name))
            continue
        kind = _OPTIONAL_TYPES.get(f.name, type(default))
        kw = {"choices": LANGUAGE_NAMES} if f.name == "language" else {}
        p.add_argument(*names, dest=f.name, type=kind, default=None, metavar=f.name.upper(),
                       help=_HELP.get(f.name), **kw)
    p.add_argument("--grid", metavar="WxH", help="grid dimensions, e.g. 240x135")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Start from ``--config`` (or defaults) and overlay every flag that was given."""
    base = RunConfig.load(args.config) if args.config else RunConfig()
    changes = {f.name: getattr(args, f.name) for f in fields(RunConfig)
               if getattr(args, f.name, None) is not None}
    if args.grid:
        try:
            w, h = (int(v) for v in args.grid.lower().split("x"))
        except ValueError:
            raise UsageError(f"--grid expects WxH, got {args.grid!r}") from None
        changes.update(grid_width=w, grid_height=h)
        changes.setdefault("topology", "grid2d")
    return base.with_(**changes)


def _fmt_row(row) -> str:
    key = getattr(row, "epoch", None)
    label = f"epoch {key}" if key is not None else f"generation {row.generation}"
    return f"{label}: high-order entropy {row.high_order_entropy:.4f}"


def cmd_run(args) -> int:
    config = config_from_args(args)
    if args.dump_config:
        print(config.to_json())
        return EXIT_OK
    progress = (lambda row: print(_fmt_row(row), flush=True)) if args.verbose else None
    result = run_experiment(config, progress)
    if result.seeded_at is not None:
        print(f"seeded {config.seed_replicator} at {result.seeded_at}")
    if result.stats_path is not None:
        print(f"stats: {result.stats_path}")
    if result.transition_epoch is None:
        print(f"no transition after {result.final_epoch} epochs")
    else:
        print(f"transition at epoch {result.transition_epoch}")
    return EXIT_OK


# ----------------------------------------------------------------- exec

_BFF_GLYPHS = set(b"<>{}-+.,[]")


def _glyph_row(tape: np.ndarray) -> str:
    return "".join(chr(b) if b in _BFF_GLYPHS else ("0" if b == 0 else " ") for b in tape)


def _marker_row(n: int, marks) -> str:
    row = [" "] * n
    for pos, ch in marks:
        if 0 <= pos < n:
            row[pos] = "*" if row[pos] != " " else ch
    return "".join(row).rstrip()


def _mnemonic(lang: Language, tape: np.ndarray, pc: int) -> str:
    if not 0 <= pc < tape.size:
        return "-"
    b = int(tape[pc])
    if lang is Language.BFF:
        return chr(b) if b in _BFF_GLYPHS else "nop"
    if lang is Language.FORTH_SOUP:
        return soup_mnemonic(b)
    if lang is Language.FORTH_COPY:
        return copy_mnemonic(b)
    width = 3 if lang is Language.SUBLEQ else 4
    ops = [int(v) - 256 if v >= 128 else int(v) for v in tape[pc: pc + width]]
    return " ".join(map(str, ops))


def _stack(lang: Language, st: np.ndarray) -> str:
    if lang is Language.FORTH_SOUP:
        sp = int(st[1])
        return "top=" + str(int(st[2 + (sp - 1) % 64]))
    if lang is Language.FORTH_COPY:
        depth = int(st[1])
        return "stack=" + str([int(v) for v in st[2: 2 + depth]])
    return ""


def hexdump(tape: np.ndarray, width: int = 16) -> str:
    lines = []
    for off in range(0, tape.size, width):
        chunk = " ".join(f"{b:02x}" for b in tape[off: off + width])
        lines.append(f"{off:04x}  {chunk}")
    return "\n".join(lines)


def build_view(program: np.ndarray, context: str, length: int) -> np.ndarray:
    """Program in the first half (zero padded), context in the second."""
    half = length // 2
    if program.size > length:
        raise UsageError(f"program of {program.size} bytes does not fit a {length}-byte view")
    tape = np.zeros(length, dtype=np.uint8)
    tape[: program.size] = program
    if context != "zeros":
        with open(context, "rb") as fh:
            ctx = np.frombuffer(fh.read(), dtype=np.uint8)[: length - half]
        if program.size > half:
            raise UsageError("a context file needs the program to fit in the first half")
        tape[half: half + ctx.size] = ctx
    return tape


def trace_execution(language, tape: np.ndarray, budget: int, start_pc: int = 0,
                    head1: int = 0, rows: int = 32, out=None):
    """Step ``tape`` one instruction at a time, printing a row per step.

    Returns ``(steps, halt_reason)``. Markers under BFF rows: ``^`` pc,
    ``r`` read head, ``w`` write head, ``*`` where they coincide.
    """
    out = out or sys.stdout
    lang = Language.parse(language)
    st = np.zeros(STATE_SIZE, dtype=np.int64)
    st[0] = start_pc
    if lang is Language.BFF:
        st[2] = head1
    tokens = np.empty(0, dtype=np.uint64)
    steps, reason = 0, HaltReason.BUDGET_EXHAUSTED
    width = len(str(max(budget, 1)))
    while steps < budget:
        pc = int(st[0])
        before = tape.copy()
        if steps < rows and lang is Language.BFF:
            # a row shows the machine just before it fetches the step's instruction
            print(f"{steps + 1:>{width}} {_glyph_row(tape)}", file=out)
            marks = [(pc, "^"), (int(st[1]), "r"), (int(st[2]), "w")]
            print(" " * (width + 1) + _marker_row(tape.size, marks), file=out)
        op = _mnemonic(lang, tape, pc)
        n, r = run_lang(int(lang), tape, tokens, False, st, 1)
        steps += int(n)
        if n and steps <= rows and lang is not Language.BFF:
            changed = np.flatnonzero(before != tape)
            writes = " ".join(f"[{i}]={tape[i]:02x}" for i in changed)
            print(f"{steps:>{width}} pc={pc:<4} {op:<14} {_stack(lang, st):<24} {writes}".rstrip(),
                  file=out)
        if r != HaltReason.BUDGET_EXHAUSTED:
            reason = HaltReason(r)
            break
    if steps > rows:
        print(f"... {steps - rows} more steps not shown", file=out)
    return steps, reason


def cmd_exec(args) -> int:
    lang = Language.parse(args.lang)
    try:
        program = load_program(args.program)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if program.size == 0:
        print("empty program: halted after 0 steps")
        return EXIT_OK
    tape = build_view(program, args.context, args.length)
    budget = lang.default_budget if args.budget is None else args.budget
    start_pc = args.start_pc
    if start_pc is None:
        start_pc = CORPUS[args.program].start_pc if args.program in CORPUS else 0
    steps, reason = trace_execution(lang, tape, budget, start_pc, args.head1, args.rows)
    print(f"halted: {reason.name.lower()} after {steps} steps")
    print(hexdump(tape))
    return EXIT_OK


# ------------------------------------------------------------- render2d


def cmd_render2d(args) -> int:
    snap = snapshot.load(args.snapshot)
    w, h = render_snapshot(snap, args.output)
    print(f"wrote {args.output} ({w}x{h})")
    return EXIT_OK


def cmd_replicators(args) -> int:
    for name, rep in CORPUS.items():
        code = rep.code()
        print(f"{name:<22} {rep.language.cli_name:<11} {code.size:>3} bytes  start pc {rep.start_pc}")
    return EXIT_OK


# ----------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="primsoup", description="Self-replicator emergence in program soups.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run an experiment")
    run.add_argument("--config", help="JSON run configuration; flags override it")
    run.add_argument("--dump-config", action="store_true", help="print the resolved config and exit")
    run.add_argument("-v", "--verbose", action="store_true", help="print every statistics row")
    _add_config_flags(run)
    run.set_defaults(func=cmd_run)

    ex = sub.add_parser("exec", help="trace one execution step by step")
    ex.add_argument("program", help="replicator name, program file, or hex string")
    ex.add_argument("--lang", required=True, choices=LANGUAGE_NAMES)
    ex.add_argument("--context", default="zeros", help="'zeros' or a file for the second half")
    ex.add_argument("--budget", type=int)
    ex.add_argument("--start-pc", type=int)
    ex.add_argument("--head1", type=int, default=0, help="initial BFF write head")
    ex.add_argument("--length", type=int, default=128, help="execution view length")
    ex.add_argument("--rows", type=int, default=32, help="steps to print")
    ex.set_defaults(func=cmd_exec)

    rd = sub.add_parser("render2d", help="render a grid snapshot as a PPM image")
    rd.add_argument("snapshot")
    rd.add_argument("output")
    rd.set_defaults(func=cmd_render2d)

    rp = sub.add_parser("replicators", help="list the shipped replicators")
    rp.set_defaults(func=cmd_replicators)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"primsoup: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"primsoup: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

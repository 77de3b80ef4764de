"""
One long tape, no program boundaries
====================================

Here there is a single 16 KiB tape. Each window starts at a random
position and runs up to 1000 forth-copy instructions; every 400k
executed instructions one byte is overwritten with a random valid
opcode. Seeding one copy of the short replicator is enough to fill the
tape with copies of it.
"""

from primsoup.experiment import seed_long_tape
from primsoup.longtape import LongTapeWorld, run_generations
from primsoup.replicators import get

world = LongTapeWorld.random(1 << 14, seed=1)
code = get("forth-copy-short").code()
offset = seed_long_tape(world, code, "random")
print("seeded at offset", offset)


def show(row):
    print(f"generation {row.generation:>3}  entropy {row.high_order_entropy:+.3f}  "
          f"mean window {row.mean_instructions_per_window:6.1f}  mutations {row.mutations_applied}")


run_generations(world, "forth-copy", windows_per_generation=2000, generations=15, sink=show)

copies = sum(bytes(world.tape[i:i + 7]) == code.tobytes() for i in range(world.tape.size - 6))
print(f"\n{copies} copies of the 7-byte replicator on a {world.tape.size}-byte tape")
# Windows get shorter as copies spread: most random starts land inside a
# copy, miss the two PUSHes, and underflow on COPY.

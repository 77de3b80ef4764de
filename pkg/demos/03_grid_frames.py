"""
Replicators spreading across a grid
===================================

On a 2D grid programs only meet neighbours within two cells, so a seeded
replicator spreads as a visible front. We write a snapshot every 10 epochs
and render each one as a PPM frame (8x8 pixels per tape).
"""

from pathlib import Path

from primsoup import snapshot
from primsoup.config import RunConfig
from primsoup.experiment import run_experiment
from primsoup.render import render_snapshot

out = Path(__file__).with_name("output") / "grid"
config = RunConfig(language="forth-soup", topology="grid2d", grid_width=64, grid_height=36,
                   epochs=80, snapshot_every=10, seed=1, seed_replicator="forth-soup-2d-inc",
                   output_dir=str(out))
result = run_experiment(config)
print("replicator seeded in tape", result.seeded_at,
      "at grid cell", divmod(result.seeded_at, config.grid_width)[::-1])

for path in result.snapshot_paths:
    snap = snapshot.load(path)
    frame = path.with_suffix(".ppm")
    w, h = render_snapshot(snap, frame)
    held = (snap.programs()[:, :6] == snap.programs()[result.seeded_at, :6]).all(axis=1).mean()
    print(f"{frame.name}: {w}x{h} px, {held:.0%} of tapes carry the replicator")

# The same frames come from the command line:
#   primsoup run --lang forth-soup --grid 64x36 --epochs 80 --snapshot-every 10 \
#       --seed-replicator forth-soup-2d-inc -o demos/output/grid
#   primsoup render2d demos/output/grid/snapshots/grid2d-00000040.rsoup frame.ppm

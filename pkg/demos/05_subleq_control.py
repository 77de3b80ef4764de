"""
SUBLEQ: a soup that stays random
================================

The same soup dynamics with one-instruction SUBLEQ programs. Unseeded,
nothing takes off and the entropy stays at the noise floor. Seeded with
the 25-byte relative-addressing replicator, the soup is taken over in a
few epochs, so replication is possible, just never found.
"""

from primsoup.config import RunConfig
from primsoup.experiment import run_experiment

for lang in ("subleq", "rsubleq4"):
    result = run_experiment(RunConfig(language=lang, num_programs=4096, epochs=1000, seed=0,
                                      stats_every=100))
    peak = max(r.high_order_entropy for r in result.rows)
    print(f"{lang:<9} unseeded, 1000 epochs: peak entropy {peak:+.4f}")

seeded = RunConfig(language="rsubleq4", num_programs=4096, epochs=200, stats_every=2,
                   seed_replicator="rsubleq4-25", stop_on_transition=True)
for seed in range(3):
    result = run_experiment(seeded.with_(seed=seed))
    print(f"rsubleq4 seeded (seed {seed}): entropy >= 1 at epoch {result.transition_epoch}")

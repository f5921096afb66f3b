"""
DAIS against the baselines
==========================

Spectral efficiency, power and decision cost for the four strategies over a
few network sizes. The same numbers come out of ``d2dsim sweep`` as CSV.
"""

import numpy as np

from d2dsim import generate
from d2dsim.metrics import collect
from d2dsim.sim import STRATEGIES, run

sizes = (50, 100, 300)
seeds = range(1, 4)

rows = {}
for n in sizes:
    for strategy in STRATEGIES:
        ms = [collect(r.topology, r) for r in
              (run(strategy, generate(n, s)) for s in seeds)]
        rows[n, strategy] = (np.mean([m.spectral_efficiency for m in ms]),
                             np.mean([m.total_tx_power for m in ms]),
                             np.mean([m.evaluations_per_decision for m in ms]))

print(f"{'N':>4} {'strategy':<15} {'SE':>9} {'power mW':>10} {'evals/dec':>10}")
for (n, strategy), (se, power, evals) in rows.items():
    print(f"{n:>4} {strategy:<15} {se:9.1f} {power:10.0f} {evals:10.1f}")

# %%
# Relative to direct communication
for n in sizes:
    base = rows[n, "no_d2d"][0]
    print(n, "  ".join(f"{s} x{rows[n, s][0] / base:.3f}" for s in STRATEGIES))

"""
One DAIS run, step by step
==========================

Generate a seeded scenario, let every agent start in arrival order and look
at the forest that comes out: which branches fired, how the roles are
spread, and what it cost in link evaluations.
"""

from d2dsim import generate, validate_topology
from d2dsim.core import Mode, path_to_bs
from d2dsim.metrics import collect
from d2dsim.sim import run
from d2dsim.wdr import node_wdr

scenario = generate(300, seed=7)
result = run("dais", scenario)
topo = result.topology

# %%
# Which branch of the selection rule decided each UE
for name, count in result.branches.most_common():
    print(f"{name:<40} {count}")

# %%
# The final roles, and the network-level numbers
m = collect(topo, result)
print({mode.value: n for mode, n in m.mode_histogram.items()})
print(f"SE {m.spectral_efficiency:.1f} b/s/Hz, power {m.total_tx_power:.0f} mW "
      f"(saved {m.power_saved:.0f}), {m.cluster_count} clusters")
print(f"{m.link_evaluations} link evaluations, "
      f"{m.evaluations_per_decision:.1f} per decision")
assert validate_topology(topo) == []

# %%
# A client's path to the BS and its bottleneck rate
client = next(n.id for n in topo.nodes.values() if n.mode is Mode.D2D_CLIENT)
path = path_to_bs(topo, client)
print("path", " -> ".join(map(str, path)), "-> BS")
for nid in path:
    print(f"  {nid:>4} {topo[nid].mode.value:<11} wdr {node_wdr(topo, nid):.3f}")

"""
Hexagonal layout and a seeded scenario
======================================

57 sites on a 200 m hexagonal lattice, 11 of them activated, one UE each.
"""

import numpy as np

from cransim.radio import RadioConfig
from cransim.scenario import build_scenario, build_topology

cfg = RadioConfig()
topo = build_topology(57, 200.0)
r = np.hypot(*topo.rrh_positions.T)
print(f"{topo.b_count} sites, farthest {r.max():.0f} m from the centre")

sc = build_scenario(cfg, 57, 200.0, 11, seed=0)
print("activated:", sc.activated.tolist())

# each UE lands in the annulus [10 m, D/2] around its own head
own = sc.topology.rrh_positions[sc.association]
dist = np.hypot(*(sc.ue_positions - own).T)
for u in range(sc.ue_count):
    print(f"  UE {u:2d} -> RRH {sc.association[u]:2d}  {dist[u]:5.1f} m  wants {sc.desired_rates[u] / 1e6:.1f} Mb/s")

# same seed, same scenario
assert build_scenario(cfg, 57, 200.0, 11, seed=0).to_json() == sc.to_json()
print("JSON size:", len(sc.to_json()), "bytes")

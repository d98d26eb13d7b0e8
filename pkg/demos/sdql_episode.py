"""
One SDQL episode
================

Every UE owns a Q-table over (floored RSRP, integer dB cut). Starting at full
power, UEs take turns cutting their serving head until the summed reward has
been zero for ten iterations.
"""

import numpy as np

from cransim.network import NetworkState
from cransim.radio import RadioConfig
from cransim.scenario import build_scenario
from cransim.sdql import Hyperparams, run_episode

cfg = RadioConfig()
hp = Hyperparams()
sc = build_scenario(cfg, 57, 200.0, 11, seed=3)
start = NetworkState.full_power(sc, cfg)
print("central at full power:", int(start.satisfied().sum()), "of", sc.ue_count)

res = run_episode(sc, cfg, hp, np.random.default_rng([3, 1]))
tr = res.trace
print(f"{tr.iterations} iterations, converged={tr.converged}")
print("Gamma per iteration:", " ".join(f"{g:.1f}" for g in tr.gammas[:15]), "...")

for u in range(sc.ue_count):
    b = int(sc.association[u])
    print(f"  UE {u:2d}: power {res.final.power_dbw(b):8.2f} dBW, "
          f"rate {res.final.throughput(u) / 1e6:5.2f} / {sc.desired_rates[u] / 1e6:.1f} Mb/s")

# interference falls as everyone cuts together, which lets everyone cut again
print("total radiated power: %.3e W -> %.3e W" % (start.total_power_w(), res.final.total_power_w()))
print("\nfirst rows of the trace CSV:")
print("\n".join(tr.to_csv().splitlines()[:6]))

"""
SDQL against the activation and sleep baselines
===============================================
"""

import numpy as np

from cransim.baselines import activation_scheme, sleep_scheme
from cransim.metrics import avg_power_reduction
from cransim.radio import RadioConfig
from cransim.scenario import build_scenario
from cransim.sdql import Hyperparams, run_episode

cfg = RadioConfig()
trials = 20
print(" k   sdql   activation  sleep   (avg power reduction, dB)")
for k in [11, 22, 34]:
    rows = []
    for seed in range(trials):
        sc = build_scenario(cfg, 57, 200.0, k, seed)
        final = run_episode(sc, cfg, Hyperparams(), np.random.default_rng([seed, 1])).final
        rows.append([avg_power_reduction(s.power_w, cfg.p_max_w).db
                     for s in (final, activation_scheme(sc, cfg), sleep_scheme(sc, cfg))])
    m = np.mean(rows, axis=0)
    print(f"{k:2d}  {m[0]:6.2f}  {m[1]:9.2f}  {m[2]:6.2f}")

# dormant heads do not radiate, so both baselines serve users identically
sc = build_scenario(cfg, 57, 200.0, 11, 0)
same = np.array_equal(activation_scheme(sc, cfg).throughputs(), sleep_scheme(sc, cfg).throughputs())
print("baseline throughputs identical:", same)

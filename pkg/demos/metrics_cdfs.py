"""
Trial reports and empirical CDFs
================================
"""

import numpy as np

from cransim.metrics import build_report, empirical_cdf
from cransim.radio import RadioConfig
from cransim.scenario import build_scenario
from cransim.sdql import Hyperparams, run_episode

cfg = RadioConfig()
reports = []
for seed in range(30):
    sc = build_scenario(cfg, 57, 200.0, 17, seed)
    res = run_episode(sc, cfg, Hyperparams(), np.random.default_rng([seed, 1]))
    reports.append(build_report("sdql", seed, res.initial, res.final, 0.5, 0.5,
                                res.trace.iterations, res.trace.converged))

r = reports[0]
print(f"seed 0: offset {r.avg_power_offset_db:.2f} dB > reduction {r.avg_power_reduction_db:.2f} dB "
      f"> interference reduction {r.avg_interference_reduction_db:.2f} dB")
print("central -> weak over all trials:", sum(x.central_to_weak for x in reports))

# per-head reductions pooled over trials
pooled = [v for x in reports for v in x.samples["power_reduction_db"]]
x, p = empirical_cdf(pooled)
for q in (0.1, 0.5, 0.9):
    print(f"  {q:.0%} of heads cut at most {x[np.searchsorted(p, q)]:.1f} dB")

its, p = empirical_cdf([x.iterations for x in reports])
print("iterations: median", its[np.searchsorted(p, 0.5)], "max", its[-1])

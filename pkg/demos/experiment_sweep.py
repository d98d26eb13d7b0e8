"""
A small sweep through the harness
=================================

The same machinery the ``cransim run`` command drives: a validated config,
cells per (activated count, algorithm, weight pair), and a summary table.
"""

import sys
import tempfile
from pathlib import Path

from cransim import harness

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
config = harness.validate_config({
    "trials": 5,
    "output_dir": str(out),
    "scenario": {"activated_counts": [11, 22]},
    "sweep": [[0.5, 0.5], [0.1, 0.9]],
})
result = harness.run_experiment(config, workers=1)
print(f"{len(result.cells)} cells, {result.failed} failed trials, written to {out}")
print((out / "summary.csv").read_text())

# bad configs name the offending field
try:
    harness.validate_config({"sdql": {"epsilon": 2.0}})
except harness.ConfigError as exc:
    print("rejected:", exc)

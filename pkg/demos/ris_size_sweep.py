"""Sweep the RIS panel size and compare beamforming schemes.

Reproduces the classic trade: larger panels help every scheme, and the
optimized profile keeps a widening lead over directional and random
reflection.  Writes a CSV consumable by the plotting frontend.

Run:  python3 demos/ris_size_sweep.py        (~2 min; see QUICK below)
"""

import numpy as np

from risloc.cli import emit_csv, run_sweep
from risloc.config import ExperimentConfig, ScenarioBlock, SweepBlock

QUICK = False  # True: fewer sizes and seeds, ~15 s

sizes = (5, 15, 30) if QUICK else (5, 10, 15, 20, 25, 30)
cfg = ExperimentConfig(
    scenario=ScenarioBlock(n_ris=2),
    sweep=SweepBlock(variable="ris_size", values=sizes,
                     n_seeds=1 if QUICK else 5),
)

result = run_sweep(cfg)
emit_csv(result, "ris_size_sweep.csv")

print(f"{'N_r^x':>6} {'random':>12} {'directional':>12} {'proposed':>12}")
for size in sizes:
    meds = [float(np.median([r.peb_m for r in result.rows
                             if r.sweep_value == size and r.scheme == scheme]))
            for scheme in ("random", "directional", "proposed")]
    print(f"{size:>6} {meds[0]:>12.1f} {meds[1]:>12.1f} {meds[2]:>12.1f}")
print("wrote ris_size_sweep.csv")

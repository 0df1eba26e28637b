"""Analytic availability, MTTF and completion time at the defaults.

Walks the full pipeline once: kernel matrix, sojourn times, embedded
chain, steady state, absorbing chain, and the completion transforms.
"""

import numpy as np

from rejuvkit import STATES, availability, mttf, sojourn_times, transition_matrix
from rejuvkit.analysis import metrics_report
from rejuvkit.config import load_config

cfg = load_config("preset_f_hypo")
p = cfg.params

print("one-step transition probabilities (non-null entries):")
P = transition_matrix(p)
for i in range(12):
    targets = ", ".join(f"{j}:{P[i, j]:.5f}" for j in range(12) if P[i, j] > 0.0)
    print(f"  {STATES[i].index:>2} {STATES[i].label:7} -> {targets}")

h = sojourn_times(p)
print("\nmean sojourn per visit [h]:")
print("  " + "  ".join(f"{STATES[i].label}:{h[i]:.4g}" for i in range(12)))

report = metrics_report(p, cfg.workload)
print(f"\navailability     = {report.availability:.10f}")
print(f"mttf             = {report.mttf:.2f} h")
print(f"completion time  = {report.completion_time:.2f} h (work {cfg.workload.x} units)")
down = np.array([report.pi[10], report.pi[11]])
print(f"downtime split   = primary {down[0]:.3e}, backup {down[1]:.3e}")
assert abs(availability(p) - report.availability) < 1e-15
assert abs(mttf(p) - report.mttf) < 1e-9

"""Planning solver runs against a video-rate frame budget.

Streaming holograms to an SLM leaves a fixed compute window per frame.
The budget planner works in hardware-independent pixel-spot operation
units: this script first measures how many units this machine executes
per millisecond, converts a 64 ms frame window into an operation budget,
and then asks the planner how many iterations each algorithm may run on
a 100-spot and a 36-spot pattern. It finishes with a budgeted three-way
comparison on the 100-spot grid, the regime where the full-range scheme
degenerates to a single iteration and barely improves on the random
start, while the compressed solver keeps its lead.

Run (a few minutes at full pupil size; pass --quick for a smaller one):
    python demos/04_frame_budget_planning.py [--quick]
"""

import sys

import holospots as hs
from holospots import bench

quick = "--quick" in sys.argv
side = 384 if quick else 1152
frame_ms = bench.DEFAULT_FRAME_MS

rate = bench.calibrate_ops_per_ms(workers=2)
budget = int(rate * frame_ms)
print(f"measured {rate:,.0f} pixel-spot ops/ms "
      f"-> {budget:,} ops per {frame_ms:.0f} ms frame\n")

pupil = hs.build_pupil(side_px=side, illumination="gaussian", waist=6e-3,
                       seed=0)
m = pupil.active_count
for name, n in (("grid100", 100), ("grid36", 36)):
    print(f"{name} on the {side} px pupil (M={m}):")
    for alg, c in (("rs", 1.0), ("wgs", 1.0), ("cswgs", 2**-4)):
        plan = hs.budget_controller(alg, m, n, budget, compression=c)
        flag = "  (over budget!)" if plan.over_budget else ""
        print(f"  {alg:>6}: {plan.iterations:4d} iterations, "
              f"{plan.predicted_ops:,} ops{flag}")
    print()

print("budgeted comparison on grid100, 3 seeds:")
summary, _ = bench.compare_at_budget(pupil, hs.named_scenario("grid100"),
                                     budget, seeds=range(3), workers=2)
for cell in (summary.rs, summary.wgs, summary.best):
    print(f"  {cell.algorithm:>6} c={cell.c:<10.6g} I={cell.iterations:<5d} "
          f"e={cell.mean_efficiency:.3f} u={cell.mean_uniformity:.3f}")

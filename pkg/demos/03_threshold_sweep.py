"""
A small threshold sweep
=======================

Failure rates for m = 1, 2, 3 around the crossing point. With 2000 trials
per point this takes well under a minute; the acceptance test uses 20000.
"""

import numpy as np

from colordecoder.montecarlo import curves_from_stats, estimate_threshold, sweep

ps = np.round(np.arange(0.05, 0.1001, 0.01), 3).tolist()
stats = sweep([1, 2, 3], ps, trials=2000, seed=1)

print(" m      p    rate   95% interval")
for s in stats:
    lo, hi = s.interval
    print(f"{s.m:2d}  {s.p:.3f}  {s.rate:.4f}  [{lo:.4f}, {hi:.4f}]")

p_th, spread, pairs = estimate_threshold(curves_from_stats(stats))
for pr in pairs:
    print(f"m={pr['m_small']} and m={pr['m_large']} cross at p={pr['p_cross']:.4f}")
print(f"threshold estimate {p_th:.4f} (spread {spread:.4f})")

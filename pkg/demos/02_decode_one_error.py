"""
Following one error through the decoder
=======================================

Draws an error on the m = 2 torus, decodes its syndrome and prints what
each rescaling level did.
"""

import numpy as np

from colordecoder import DecoderConfig, decode
from colordecoder.lattice import get_level

m, p = 2, 0.06
lv = get_level(m)
rng = np.random.default_rng(7)
error = (rng.random(lv.n) < p).astype(np.uint8)
syndrome = lv.syndrome_of(error)
print(f"{error.sum()} flips, {syndrome.sum()} lit checks")

for config in (DecoderConfig(mode="hard"), DecoderConfig()):
    result = decode(m, syndrome, p, config)
    residual = error ^ result.estimate
    ok = not lv.syndrome_of(residual).any() and not lv.logical_class(residual).any()
    print(f"\n{config.mode} mode: estimate weight {result.estimate.sum()}, success={ok}")
    for t in result.traces:
        print(
            f"  level {t.level}: {int(t.local[0].astype(bool).sum())} cells corrected locally, "
            f"{int(t.coarse_syndrome.sum())} checks passed down, "
            f"max coarse prior {t.coarse_priors.max():.3f}"
        )

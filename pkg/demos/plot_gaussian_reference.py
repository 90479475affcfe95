"""
Gaussian reference
==================

White Gaussian noise has Gaussian increments at every lag: skewness 0 and
flatness 3 everywhere. Departures from flat / 3 = 1 in real scenes measure
how far the increments are from Gaussian.
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import sf2d

field = sf2d.generate(
    sf2d.SynthSpec(512, 512, seed=2024, components=(sf2d.GaussianNoise(1.0),))
)
sm = sf2d.compute_statmaps(field, sf2d.LagGridSpec(max_lag=32))

ok = np.isfinite(sm.skew)
print(f"max |skew|         {np.abs(sm.skew[ok]).max():.3f}")
print(f"max |flat/3 - 1|   {np.abs(sm.flat[ok] / 3 - 1).max():.3f}")

fig, ax = plt.subplots(1, 2, figsize=(9, 3.5))
ax[0].hist(sm.skew[ok], bins=50)
ax[0].set_title("skewness over lags")
ax[1].hist(sm.flat[ok] / 3, bins=50)
ax[1].set_title("flat / 3 over lags")

out = sys.argv[1] if len(sys.argv) > 1 else "."
fig.savefig(f"{out}/gaussian_reference.png", dpi=100)

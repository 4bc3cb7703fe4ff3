"""A walking tour of transvariation-based typicality scoring.

The score asks: how many training points sit on the *far* side of a query,
relative to where the group's center sits? A query at the center is maximally
typical (score 1); a query beyond all the data is maximally atypical (0).
Run from the repository root:  python demos/01_typicality_scores.py
"""

import numpy as np

from tocc import (MixtureDensity, OrthantIntegrator, RngStream,
                  multivariate_tp, multivariate_tp_density, spatial_median,
                  univariate_tp)

# ---------------------------------------------------------------------------
# One dimension first: five points, median 3.
# ---------------------------------------------------------------------------
xs = [1.0, 2.0, 3.0, 4.0, 5.0]
print("data:", xs, "| median m = 3")
for c in (3.0, 3.5, 4.5, 5.0, 10.0):
    score = univariate_tp(xs, c, m=3.0)
    print(f"  tp(c={c:>4}) = {score.value:.2f}   "
          f"(weighted opposite-side count {score.numerator_count:.1f} "
          f"of max {score.denominator_count:.1f})")
print("Moving c outward monotonically drains the score; ties count half.\n")

# ---------------------------------------------------------------------------
# Two dimensions: the same idea per coordinate, jointly.
# ---------------------------------------------------------------------------
gen = np.random.default_rng(7)
cloud = gen.multivariate_normal([0, 0], [[1.0, 0.35], [0.35, 1.0]], size=400)
center = spatial_median(cloud)
print(f"spatial median of the cloud: ({center[0]:+.3f}, {center[1]:+.3f})")

for c in ([0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [4.0, 4.0], [2.0, -2.0]):
    score = multivariate_tp(cloud, c, center)
    print(f"  tp(c=({c[0]:+.1f},{c[1]:+.1f})) = {score.value:.3f}")
print("Diagonal queries fade faster than the axes suggest: both coordinates"
      " must be extreme at once.\n")

# ---------------------------------------------------------------------------
# The density-based twin: identical geometry, mass instead of counts.
# ---------------------------------------------------------------------------
density = MixtureDensity([1.0], [[0.0, 0.0]], [[[1.0, 0.35], [0.35, 1.0]]])
integrator = OrthantIntegrator("monte_carlo", 100_000, RngStream(42))
print("counting score vs density score on the same queries:")
for c in ([1.0, 1.0], [2.0, 2.0], [0.5, -1.5]):
    counted = multivariate_tp(cloud, c, center).value
    massed = multivariate_tp_density(density, c, center, integrator).value
    print(f"  c=({c[0]:+.1f},{c[1]:+.1f})   counts {counted:.3f}   "
          f"density {massed:.3f}")
print("With enough data the two agree; the density version extrapolates"
      " smoothly where counts go granular.")

"""
Simulating the up-down chain
============================

A compiled treap holds the table sizes so that each composed step costs
logarithmic time. Runs start from an exact stationary draw, so empirical
statistics can be compared to exact values with no burn-in.
"""

# %%
from fractions import Fraction

import numpy as np

from ocrp.compositions import Params
from ocrp.kernels import stationary_law
from ocrp.simulation import (
    empirical_distribution,
    endpoint_m2,
    largest_jump,
    run,
    stationary_m2_expectation,
    tv_distance,
)

params = Params(Fraction(1, 2), Fraction(1, 2))

# %% Occupation frequencies of a long run against the exact law at n = 6
emp = empirical_distribution(6, params, 200_000, seed=7)
print("TV distance:", round(tv_distance(emp, dict(stationary_law(6, params).items())), 4))

# %% One trajectory at n = 200, recorded at rescaled times
for rec in run(200, params, "1", ["0", "0.5", "1"], seed=7, keep_comp=False):
    print(f"t={rec.t}  tables={rec.stats['num_blocks']}  largest={rec.stats['largest']:.3f}  m2={rec.stats['m2']:.3f}")

# %% The second moment statistic averages to (1 - alpha) / (1 + theta)
values = endpoint_m2(100, params, 100**2, 100, seed=7)
print("mean", values.mean().round(4), "target", stationary_m2_expectation(100, params))

# %% Jumps in the Hausdorff metric are one grid cell at most
for n in (25, 50, 100):
    print(n, "largest jump:", largest_jump(n, params, 0.5, seed=7, samples=2))

"""
Compositions as open subsets of the unit interval
=================================================

A composition of n cuts (0, 1) at its normalized partial sums. Distances
between open sets compare their complements in the Hausdorff metric.
"""

# %%
from fractions import Fraction

from ocrp.compositions import Composition
from ocrp.opensets import OpenIntervalSet, approximate, eval_mo, hausdorff, iota, monomial_convergence_check

# %% Embedding and distances
U = iota((1, 2, 1))
print("iota(1,2,1) =", U)
print("d(iota(1,2,1), (0,1)) =", hausdorff(U, OpenIntervalSet.parse("0,1")))

# %% Grid approximations of an open set with a gap
V = OpenIntervalSet.parse("0,1/3;1/2,1")
for n in (3, 6, 12, 24, 48):
    approx = approximate(V, n)
    print(f"n={n:>3}  distance {str(hausdorff(V, approx)):>6} <= 1/{n}")

# %% Monomials extend continuously: ratios along (k, k) converge to the value on (0,1/2) u (1/2,1)
limit = OpenIntervalSet.parse("0,1/2;1/2,1")
for mu in ((2,), (1, 1)):
    rows = monomial_convergence_check(mu, [Composition((k, k)) for k in (5, 10, 20, 40, 80)], limit)
    print(mu, "limit", eval_mo(mu, limit), [f"{float(err):.4f}" for _, _, err in rows])

# %% On a set with a gap the value is the limit along grid approximations,
# extrapolated exactly or iterated in floating point
print("m^o_(2) on (0,1/3) u (1/2,1):", eval_mo((2,), V), "~", eval_mo((2,), V, method="grid", eps=1e-5))

"""
Exact kernels on compositions
=============================

Build the up and down kernels with rational entries, compose them, and
confirm that the stationary law is fixed by the composed step.
"""

# %%
from fractions import Fraction

from ocrp.compositions import Params, ranked
from ocrp.kernels import build_down_matrix, build_transition_matrix, build_up_matrix, lumpability_defects, stationary_law

params = Params(Fraction(1, 2), Fraction(1, 2))

# %% The stationary law on compositions of 4, heaviest states first
law = stationary_law(4, params)
for sigma, w in sorted(law.items(), key=lambda kv: -kv[1]):
    print(f"{str(tuple(sigma)):>14}  {str(w):>8}  {float(w):.4f}")
print("total mass:", law.total())

# %% Pushing M_4 through an up-step lands exactly on M_5
up = build_up_matrix(4, params)
pushed = up.left_apply(dict(law.items()))
print("M_4 p_up == M_5:", pushed == dict(stationary_law(5, params).items()))

# %% The composed step T_4 = up then down keeps M_4 fixed
T = build_up_matrix(4, params) @ build_down_matrix(4)
fixed = T.left_apply(dict(law.items()))
print("M_4 T_4 == M_4:", all(fixed.get(s, 0) == w for s, w in law.items()))

# %% Forgetting the order of the parts gives a Markov chain of its own
for n in range(1, 7):
    print(n, "lumpable on ranked fibers:", lumpability_defects(build_transition_matrix(n, params), key=ranked) == [])

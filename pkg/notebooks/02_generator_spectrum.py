"""
The limiting generator on quasisymmetric functions
==================================================

Rescaled transition operators act on the span of monomials of bounded degree.
Their limit is triangular by degree, so its eigenvalues can be read off the
diagonal. We also watch the rescaled operators approach it.
"""

# %%
from fractions import Fraction

from ocrp.compositions import Params, compositions_up_to
from ocrp.operators import Form, generator_convergence, generator_matrix, spectrum
from ocrp.qsym import eval_mstar, g, g_total

params = Params(Fraction(1, 2), Fraction(1, 2))

# %% Factorial monomials count paths: m*_sigma(tau) = g(sigma, tau) |tau|^(|sigma|) / g(tau)
sigma, tau = (1, 1), (2, 1, 1)
falling = 4 * 3
print(eval_mstar(sigma, tau), "==", Fraction(g(sigma, tau) * falling, g_total(tau)))

# %% Generator matrix on degree <= 2 (rows are images of m_sigma)
A = generator_matrix(2, params, Form.FACTORIZED)
for s, row in zip(A.basis_order, A.entries):
    print(f"{str(tuple(s)):>8}", [str(x) for x in row])

# %% Eigenvalues -m(m - 1 + theta), with multiplicity 2^(m-1)
for value, mult in spectrum(4, params):
    print(f"{str(value):>6}  x{mult}")

# %% n^2 (T_n - 1) approaches the generator at rate about 1/n
for rho in compositions_up_to(2)[1:]:
    rows = generator_convergence(2, rho, [10, 20, 40, 80], params)
    print(tuple(rho), [f"{float(r):.4f}" for _, r in rows])

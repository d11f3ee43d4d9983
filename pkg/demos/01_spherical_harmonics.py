# %%
"""
Spherical harmonics and the polynomial table
============================================

Y_l^m evaluated two ways: the associated Legendre recurrence, and the
exact polynomial-in-cos(theta) table used by the recovery pipeline.
"""
import numpy as np

from sphfri import build_legendre_poly_table, eval_ylm, eval_ylm_all

# %% a few values
for l, m in [(0, 0), (1, 0), (1, 1), (2, -1), (4, 2)]:
    print(f"Y_{l}^{m}(0.7, 1.3) =", eval_ylm(l, m, 0.7, 1.3))

# %% orthonormality by quadrature
L = 8
x, w = np.polynomial.legendre.leggauss(L + 1)
n_phi = 2 * L + 1
tt, pp = np.meshgrid(np.arccos(x), 2 * np.pi * np.arange(n_phi) / n_phi, indexing="ij")
weights = np.outer(w, np.full(n_phi, 2 * np.pi / n_phi)).ravel()
Y = eval_ylm_all(L, tt.ravel(), pp.ravel())
rows = np.array([Y[l, m + L - 1] for l in range(L) for m in range(-l, l + 1)])
gram = (rows * weights) @ rows.conj().T
print("max |G - I| =", np.abs(gram - np.eye(len(rows))).max())

# %% the table reproduces Y_l^m(theta, 0)
table = build_legendre_poly_table(16)
theta = np.linspace(0.05, np.pi - 0.05, 7)
worst = max(
    np.abs(table.evaluate(l, m, theta) - eval_ylm(l, m, theta)).max()
    for l in range(16)
    for m in range(-l, l + 1)
)
print("table vs recurrence, l < 16:", worst)

# %% precision degrades with degree: the coefficients grow fast
for l in (5, 10, 20, 30):
    big = build_legendre_poly_table(l + 1)
    print(l, "sum |c^p_l0| =", sum(abs(big.coeff(l, 0, p)) for p in range(l + 1)))

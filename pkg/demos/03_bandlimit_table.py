# %%
"""
How many coefficients are needed?
=================================

Minimal bandlimit for K Diracs next to the 2K and K + sqrt(K) rules.
"""
from sphfri import annihilating_row_count, required_bandlimit

print(" K   L  2K  K+sqrt(K)  rows")
for K in range(1, 21):
    plan = required_bandlimit(K)
    rows = annihilating_row_count(K, plan.L_required)
    print(f"{K:2d} {plan.L_required:3d} {plan.L_two_k:3d} {plan.L_k_sqrt_k:6d} {rows:9d}")

# %% the count grows like K + sqrt(K), so the saving over 2K keeps growing
for K in (50, 100, 1000):
    plan = required_bandlimit(K)
    print(K, plan.L_required, plan.L_two_k, (plan.L_two_k ** 2) / plan.L_required ** 2)

"""Phase diagram: one translation-invariant measure or three periodic ones.

The total activity Lambda decides everything. Below Lambda_cr = k^k/(k-1)^(k+1)
the fixed-point map has a single fixed point; above it a two-cycle (A, B)
appears around the translation-invariant root.
"""

# %%
import numpy as np

from hcgibbs import (
    classify,
    closed_form_pair_k2,
    critical_lambda,
    fixed_points_of_h,
    solve_translation_invariant,
)

for k in range(2, 7):
    print(f"k={k}  Lambda_cr = {critical_lambda(k):.10g}  A0 at Lambda_cr = "
          f"{solve_translation_invariant(k, critical_lambda(k)):.10g}  (1/(k-1) = {1 / (k - 1):.10g})")

# %% sweep Lambda across the threshold on the binary tree
for lam in (1.125, 3.0, 4.0, 4.5, 16 / 3, 10.0):
    r = classify(2, lam)
    pair = "" if r.pair is None else f"  pair ({r.pair[0]:.6f}, {r.pair[1]:.6f})"
    print(f"Lambda={lam:<8.5g} {r.regime.value:<14} A0={r.A0:.6f}{pair}")

# %% for k = 2 the pair is A, B = (L - 2 -+ sqrt(L (L - 4))) / 2; A B = 1 and A + B = L - 2
for lam in np.linspace(4.1, 12.0, 5):
    A, B = closed_form_pair_k2(lam)
    print(f"Lambda={lam:6.3f}  A={A:.6f}  B={B:.6f}  AB={A * B:.12f}  A+B-(L-2)={A + B - lam + 2:+.1e}")

# %% the fixed points of f o f just above criticality, k = 3
lam = critical_lambda(3) * 1.01
print("k=3, 1% above Lambda_cr:", fixed_points_of_h(3, lam))

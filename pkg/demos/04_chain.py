"""The tree-indexed Markov chain behind each measure.

Row 0 of the kernel spreads mass over all spins in proportion to
lambda_j z_j; every other row jumps back to 0. The stationary vector is known
in closed form, and the truncated kernel only has to confirm it.
"""

# %%
import numpy as np

from hcgibbs import (
    ActivitySpec,
    boundary_law_from_A,
    build_periodic_kernel,
    build_ti_kernel,
    periodic_pair,
    stationarity_residual,
    stationary_periodic,
    stationary_ti,
)
from hcgibbs.chain import minimal_truncation

spec = ActivitySpec.telescoping(0.25)
law = boundary_law_from_A(spec, 2, 0.5)
N = minimal_truncation(spec, law, 1e-12)
P = build_ti_kernel(spec, law)
X = stationary_ti(spec, law)
print(f"smallest N with certified tail <= 1e-12: {N}")
print(f"x0 = (1+S)/(1+2S) = {X.x0:.15f}  with S = {X.S:.15f}")
print(f"row sums {P.row_sums()}, residual {stationarity_residual(X, P):.2e}")

# %% the residual shrinks as the truncation grows, down to rounding
for n in (10, 100, 1000, 10 ** 4):
    Pn = build_ti_kernel(spec, law, n, tol=1.0)
    print(f"N={n:>6}  tail {Pn.tail_mass:.2e}  residual {stationarity_residual(X, Pn):.2e}")

# %% the two-step kernel of the periodic chain at Lambda = 9/2
spec4 = ActivitySpec.telescoping(1.0)
pair = periodic_pair(spec4, 2, 0.5, 2.0)
Q = build_periodic_kernel(spec4, pair, 10 ** 4, tol=1e-9)
Y = stationary_periodic(spec4, pair)
print(f"periodic x0 = (1+S)/(1+S+S~) = {Y.x0:.15f}, residual {stationarity_residual(Y, Q):.2e}")

# %% a plain power iteration on a dense N=40 truncation agrees up to the dropped tail
D = build_ti_kernel(spec, law, 40, tol=1.0).to_dense()
x = np.full(D.shape[0], 1 / D.shape[0])
for _ in range(200):
    x = x @ D
print(f"power iteration x0 = {x[40]:.12f}  closed form {X.x0:.12f}")

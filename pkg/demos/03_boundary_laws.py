"""Boundary laws: from a root A to the whole sequence z_j.

A root of the fixed-point equation fixes every z_j = lambda_j / (1 + A)^k at
once. The sum of the z_j must give A back. That consistency check catches
perturbed or wrong laws, and a separate test asks whether the law is
normalisable.
"""

# %%
from hcgibbs import (
    ActivitySpec,
    boundary_law_from_A,
    consistency_residual,
    law_sum,
    normalisability_check,
    periodic_pair,
)

spec = ActivitySpec.telescoping(0.25)
law = boundary_law_from_A(spec, 2, 0.5)
print("z_j, j=-3..3:", [round(law.z(j), 12) for j in range(-3, 4)])
print("sum z =", law_sum(law).value, " residual", consistency_residual(law))

# %% one perturbed entry, or a wrong root, shows up at the perturbation scale
bad = law.perturbed(1, 0.01)
print("perturbed z_1 by 0.01, residual", consistency_residual(bad))
print("wrong root A=0.6, residual", consistency_residual(boundary_law_from_A(spec, 2, 0.6)))

# %% the periodic pair on the same kind at Lambda = 9/2: even law from B, odd law from A
spec4 = ActivitySpec.telescoping(1.0)
pair = periodic_pair(spec4, 2, 0.5, 2.0)
print("even z_1 =", pair.law_even.z(1), " odd z~_1 =", pair.law_odd.z(1))
print("sum z =", law_sum(pair.law_even).value, " sum z~ =", law_sum(pair.law_odd).value)
print("pair residual", consistency_residual(pair))

# %% normalisability: sum_j z_j^((k+1)/k) must converge
print(normalisability_check(law))
print(normalisability_check(law.with_profile(2 / 3)))

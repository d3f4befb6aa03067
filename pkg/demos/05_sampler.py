"""Sampling configurations on a finite ball of the tree.

The root is drawn from the stationary vector, then every vertex is drawn
from its parent's row of the kernel. Occupied parents force vacant
children, so no edge ever carries two nonzero spins. In a periodic measure
the even and odd levels settle on different vacancy rates.
"""

# %%
import numpy as np

from hcgibbs import (
    ActivitySpec,
    admissibility_check,
    boundary_law_from_A,
    effective_count,
    empirical_marginals,
    parity_marginal,
    periodic_measure,
    periodic_pair,
    sample_tree,
    sample_trees,
    ti_measure,
)

spec = ActivitySpec.telescoping(0.25)
mu0 = ti_measure(spec, boundary_law_from_A(spec, 2, 0.5))
tree = sample_tree(spec, mu0, 2, 4, seed=1)
for m, level in enumerate(tree.spins):
    print(f"level {m}: {level.tolist()}")

# %% ten thousand trees of depth 6
samples = sample_trees(spec, mu0, 2, 6, 10 ** 4, seed=7)
print("violations:", sum(not admissibility_check(s) for s in samples))
root0 = np.mean([s.spins[0][0] == 0 for s in samples])
print(f"root vacancy {root0:.4f}, closed form {parity_marginal(mu0, 0).x0:.4f}")

# %% the first periodic measure at Lambda = 9/2
spec4 = ActivitySpec.telescoping(1.0)
mu1 = periodic_measure(spec4, periodic_pair(spec4, 2, 0.5, 2.0), 1)
psamples = sample_trees(spec4, mu1, 2, 6, 4000, seed=8)
for parity, p in (("even", 0), ("odd", 1)):
    f = empirical_marginals(psamples, parity)[0]
    m_eff = effective_count(psamples, parity)
    sigma = np.sqrt(f * (1 - f) / m_eff)
    print(f"{parity:<4} vacancy {f:.4f} +- {sigma:.4f} (effective n {m_eff:.0f}), "
          f"closed form {parity_marginal(mu1, p).x0:.4f}")

# %% same seed, same trees, whatever HCGIBBS_THREADS says
again = sample_trees(spec4, mu1, 2, 6, 4000, seed=8)
print("reproducible:", all(np.array_equal(a.spins[6], b.spins[6]) for a, b in zip(psamples, again)))

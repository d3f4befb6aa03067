"""Activity sequences and certified sums.

Each built-in kind knows its total in closed form and a rigorous bound on
the tail past any cutoff. Weighted sums stop as soon as that bound drops
below the tolerance.
"""

# %%
import math

from hcgibbs import ActivitySpec, boundary_law_from_A, sum_activities, sum_weighted, tail_bound

specs = {
    "telescoping c=1/4": ActivitySpec.telescoping(0.25),
    "poisson 2.4 / 8": ActivitySpec.poisson(2.4, 8.0),
    "geometric 0.4 / 0.475": ActivitySpec.geometric(0.4, 0.475),
}

# %% totals; every built-in kind sums in closed form, so no terms are needed
for name, spec in specs.items():
    s = sum_activities(spec)
    print(f"{name:<24} Lambda = {s.value:.15g}  tail <= {s.tail_bound:.1e}  terms {s.terms_used}")

# %% the telescoping tail decays like 1/n, so the bound is the whole story
spec = specs["telescoping c=1/4"]
for n in (10, 100, 1000):
    print(f"tail past {n:>4}: {tail_bound(spec, n):.3e}  (9c/8n = {9 * 0.25 / (8 * n):.3e})")

# %% a weighted sum: sum_j lambda_j z_j with the boundary law z_j = lambda_j / (1 + A)^2, A = 1/2
law = boundary_law_from_A(spec, 2, 0.5)
w = sum_weighted(spec, law)
print(f"weighted sum {w.value:.15g} with {w.terms_used} terms, tail <= {w.tail_bound:.1e}")

# %% JSON round trip, as the command line reads it
text = '{"kind": "poisson", "rate_pos": 2.4, "rate_neg": 8.0}'
again = ActivitySpec.from_json(text)
print(again.to_dict(), math.isclose(sum_activities(again).value, 2 - math.exp(-2.4) - math.exp(-8)))

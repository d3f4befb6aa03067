"""Gibbs measures of the hard-core model with spins in the integers on Cayley trees.

Submodules:

``activities``  activity sequences and certified series sums
``phase``       the scalar fixed-point systems and the phase classification
``boundary``    boundary laws and their consistency checks
``chain``       transition kernels and stationary vectors
``simulate``    seeded sampling on finite tree balls
``cli``         the ``hcgibbs`` command
"""

from .activities import (
    ActivitySpec,
    Kind,
    SeriesSum,
    lambda_at,
    lambda_values,
    sum_activities,
    sum_weighted,
    tail_bound,
)
from .boundary import (
    BoundaryLaw,
    Normalisability,
    PeriodicLawPair,
    boundary_law_from_A,
    consistency_residual,
    law_sum,
    normalisability_check,
    periodic_pair,
)
from .chain import (
    StationaryDist,
    TransitionKernel,
    build_periodic_kernel,
    build_ti_kernel,
    minimal_truncation,
    stationarity_residual,
    stationary_periodic,
    stationary_ti,
)
from .errors import (
    DivergenceError,
    DomainError,
    FixedPointScanError,
    HCGibbsError,
    NumericalError,
    TruncationError,
)
from .phase import (
    ModelParams,
    PhaseReport,
    Regime,
    analyze,
    classify,
    closed_form_pair_k2,
    critical_lambda,
    fixed_points_of_h,
    solve_translation_invariant,
    solve_two_periodic,
)
from .simulate import (
    Measure,
    TreeBall,
    TreeSample,
    TreeSampler,
    admissibility_check,
    effective_count,
    empirical_marginals,
    parity_marginal,
    periodic_measure,
    sample_tree,
    sample_trees,
    ti_measure,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

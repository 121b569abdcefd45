"""Equilibrium solver for time-inconsistent optimal stopping on finite
Markov chains under general (nonexponential) discounting.

Core surface: build a :class:`MarkovModel`, then

- :func:`smallest_equilibrium` / :func:`optimal_values` for the canonical
  solution,
- :func:`check_region` / :func:`enumerate_regions` for equilibrium
  catalogs (exact or outside-only, with additive slack),
- :func:`relaxed_values` for the slack-indexed optimal values,
- :mod:`eqstop.stability` for experiments over converging model
  sequences, and :mod:`eqstop.repro` for the built-in scenarios.

Hot kernels run in a compiled extension when available; a NumPy fallback
is selected automatically at import (see :mod:`eqstop.backend`).
"""

from .backend import BACKEND
from .chain import HittingDistribution, hitting_distribution, kernel_tv_gap, tv_distance
from .discount import DiscountFunction, evaluate, validate_assumption
from .equilibrium import (
    EXACT,
    PSEUDO,
    EquilibriumCatalog,
    EquilibriumKind,
    Verdict,
    check_region,
    enumerate_regions,
    exact,
    forced_members,
    intersection_oracle,
    optimal_values,
    pseudo,
    relaxed_value_cascade,
    relaxed_values,
    shifted_model,
    smallest_equilibrium,
)
from .errors import (
    DimensionMismatch,
    EnumerationTooLarge,
    EqstopError,
    HorizonExhausted,
    IndeterminateCatalog,
    IndeterminateMembership,
    ModelValidationError,
)
from .model import MarkovModel, NumericPolicy
from .repro import build_example, run_scenario_checks
from .stability import (
    ModelSequence,
    StabilityReport,
    convergence_diagnostics,
    run_sequence_experiment,
    set_liminf,
    set_limsup,
)
from .value import (
    ValueInterval,
    constrained_sup_value,
    j_value,
    j_values,
    superset_sup_value,
)

__version__ = "0.1.0"

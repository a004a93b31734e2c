"""Supercoherent states of the supersymmetric harmonic oscillator.

Eigenstates of the generalized 2x2 annihilation operator built from a
complex parameter matrix K: region classification (degenerate, singular,
generic bounded/unbounded), closed-form state constructors per region with
an independent Fock-recursion oracle, quadrature uncertainties with
large-|z| asymptotics, and sweep/fit/grid analysis tooling.
"""

from .errors import (
    NoEigenstateError,
    NumericalError,
    RegionError,
    SupercoherentError,
    TruncationOverflowError,
    ZeroNormError,
)
from .susy_core import (
    DEFAULT_CLASSIFY_TOL,
    KMatrix,
    Region,
    RegionClass,
    Spectrum,
    TwoByTwo,
    classify,
    eigen_decompose,
    gauge_normalize,
    theta_operator,
)
from .states import (
    DEFAULT_N_CAP,
    ENV_N_CAP,
    CoherentTerm,
    FockExpansion,
    SuperState,
    apply_sao,
    degenerate_basis,
    degenerate_mus,
    eigen_residual,
    fock_solve,
    generic_basis,
    generic_mus_basis,
    mixed_state,
    singular_state,
    to_fock,
)
from .observables import (
    MU,
    MU2,
    OVERLAP,
    XI,
    XI2,
    AsymptoticParams,
    Moment,
    UncertaintyReport,
    asymptotic_params,
    asymptotic_variances,
    braket_derivative,
    coherent_moment,
    coherent_overlap,
    expectation,
    uncertainty,
)
from .analysis import (
    DivergenceFit,
    MaxUncertainty,
    ParamGrid,
    SweepRow,
    SweepSpec,
    canonical_scs_check,
    find_max_uncertainty,
    fit_divergence,
    param_grid_classify,
    sweep,
    theta_grid,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "SupercoherentError",
    "RegionError",
    "NoEigenstateError",
    "TruncationOverflowError",
    "ZeroNormError",
    "NumericalError",
    # operator core
    "DEFAULT_CLASSIFY_TOL",
    "KMatrix",
    "TwoByTwo",
    "Region",
    "RegionClass",
    "Spectrum",
    "classify",
    "eigen_decompose",
    "theta_operator",
    "gauge_normalize",
    # states
    "DEFAULT_N_CAP",
    "ENV_N_CAP",
    "CoherentTerm",
    "SuperState",
    "FockExpansion",
    "fock_solve",
    "generic_basis",
    "generic_mus_basis",
    "degenerate_basis",
    "degenerate_mus",
    "singular_state",
    "mixed_state",
    "to_fock",
    "apply_sao",
    "eigen_residual",
    # observables
    "OVERLAP",
    "XI",
    "XI2",
    "MU",
    "MU2",
    "Moment",
    "UncertaintyReport",
    "AsymptoticParams",
    "coherent_overlap",
    "coherent_moment",
    "braket_derivative",
    "expectation",
    "uncertainty",
    "asymptotic_params",
    "asymptotic_variances",
    # analysis
    "SweepSpec",
    "SweepRow",
    "DivergenceFit",
    "MaxUncertainty",
    "ParamGrid",
    "theta_grid",
    "sweep",
    "fit_divergence",
    "find_max_uncertainty",
    "canonical_scs_check",
    "param_grid_classify",
]

"""Sliding-mode boundary control of a 1D heat equation via Faedo-Galerkin approximation."""

from .problem import (
    BoundaryInfluence,
    CoercivityReport,
    DomainError,
    ProblemSpec,
    ScalarField,
    analyze,
    basis_eval,
    basis_grad,
    field_eval,
)
from .galerkin import (
    GalerkinSystem,
    Quadrature,
    RepresentabilityError,
    assemble,
    gauss_legendre,
    h_norm,
    project_covector,
    reconstruct,
    seminorm,
    v_norm,
)
from .sliding import (
    ControlSample,
    Controller,
    ControllerConfig,
    TransversalityError,
    boundary_layer_control,
    equivalent_control,
    gain,
    reaching_time_bound,
    relay_control,
    sliding_output,
)
from .sim import (
    SimConfig,
    SimulationDivergence,
    Trajectory,
    exact_modal_solution,
    simulate,
    step_semi_implicit,
)
from .diagnostics import (
    ConvergenceTable,
    EnergyCheck,
    GrowthCheck,
    check_energy,
    check_growth,
    convergence_study,
    growth_constants,
)

__version__ = "0.1.0"

"""Numerical laboratory for finite-time chemotactic collapse.

Certifies explicit exploding subsolutions of the transformed radial
chemotaxis systems (unit disk and unit 4-ball), integrates the transformed
degenerate parabolic problems with blowup detection, and reproduces the
critical-mass phenomenology (8*pi and 64*pi^2) through sweeps, comparison
monitoring, energy audits and collapse diagnostics.
"""
from .model import (
    CRITICAL_MASS_2D,
    CRITICAL_MASS_4D,
    Grid,
    MassProfile,
    Params2D,
    Params4D,
    RadialProfile,
    Violation,
    params2d_slacks,
    params4d_slacks,
    validate_params2d,
    validate_params4d,
)
from .transform import (
    PotentialProfile,
    density_from_mass_2d,
    density_from_mass_4d,
    forward_mass_2d,
    forward_mass_4d,
    mass_2d,
    mass_4d,
    reconstruct_potential,
)
from .subsolutions import (
    Certificate,
    StationaryFamily2D,
    StationaryFamily4D,
    Subsolution2D,
    SubsolutionPair4D,
    build_initial_data_2d,
    build_initial_data_4d,
    certify_subsolution_2d,
    certify_subsolution_4d,
    eval_stationary,
    eval_subsolution_2d,
    eval_subsolution_4d,
    mobius_envelope,
    production_residual_4d,
    select_parameters_2d,
    select_parameters_4d,
    transport_residual_2d,
    transport_residual_4d,
)
from .solver import (
    ComparisonReport,
    SolverState2D,
    SolverState4D,
    StepCollapseError,
    Trajectory,
    comparison_monitor,
    run_2d,
    run_4d,
    step_2d,
    step_4d,
)
from .energetics import (
    AuditTable,
    CollapseReport,
    EnergyReport,
    collapse_diagnostics,
    dissipation,
    energy,
    energy_report,
    invariant_audit,
)
from .sweep import BracketError, SweepResult, run_sweep

__version__ = "0.1.0"

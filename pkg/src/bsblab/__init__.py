"""Damped beam-string-beam transmission lab.

Discretizes a serially coupled structure (two fourth-order beams joined by
a second-order string, clamped at the outer ends) into the first-order
pencil B y' = K y, integrates it with an energy-exact trapezoidal rule,
and certifies exponential energy decay against the pencil spectrum and
resolvent. See README.md for the layout and the CLI.
"""

from .model import (
    DampingCase,
    InitialData,
    NegativeDamping,
    OrderingViolation,
    StructureConfig,
    classify_damping,
    default_initial_data,
    validate_config,
)
from .fem import (
    DofMap,
    IncompatibleInterface,
    Mesh,
    NonpositiveLength,
    OutOfDomain,
    StateVector,
    SystemPencil,
    ZeroElements,
    assemble_beam_pencil,
    assemble_pencil,
    assemble_string_pencil,
    build_dof_map,
    build_mesh,
    discretize,
    element_matrices,
    evaluate_state,
    interpolate,
)
from .dynamics import (
    DimensionMismatch,
    EnergyTrace,
    NonpositiveWeight,
    SimOutput,
    SolveFailure,
    cross_functional,
    cross_term_bound_constant,
    default_dt,
    default_energy_weight,
    dissipation,
    energy,
    lyapunov_functional,
    simulate,
    step_backward_euler,
    step_trapezoidal,
)
from .spectral import (
    EmptySpectrum,
    FactorizationFailure,
    NonpositiveParameter,
    ResolventTable,
    SpectrumReport,
    beam_clamped_free_frequencies,
    eigenvalue_exclusion_determinant,
    eigenvalues,
    resolvent_norm,
    resolvent_sweep,
    slowest_mode,
    spectral_abscissa,
    string_modes_closed_form,
)
from .analysis import (
    DecayCertificate,
    DecayFit,
    InvariantResult,
    LyapunovAudit,
    NonpositiveEnergy,
    VerificationReport,
    WindowTooSmall,
    certify_decay,
    cross_validate,
    fit_decay,
    lyapunov_audit,
    render_report,
)

__version__ = "0.1.0"

__all__ = [
    "DampingCase",
    "InitialData",
    "NegativeDamping",
    "OrderingViolation",
    "StructureConfig",
    "classify_damping",
    "default_initial_data",
    "validate_config",
    "DofMap",
    "IncompatibleInterface",
    "Mesh",
    "NonpositiveLength",
    "OutOfDomain",
    "StateVector",
    "SystemPencil",
    "ZeroElements",
    "assemble_beam_pencil",
    "assemble_pencil",
    "assemble_string_pencil",
    "build_dof_map",
    "build_mesh",
    "discretize",
    "element_matrices",
    "evaluate_state",
    "interpolate",
    "DimensionMismatch",
    "EnergyTrace",
    "NonpositiveWeight",
    "SimOutput",
    "SolveFailure",
    "cross_functional",
    "cross_term_bound_constant",
    "default_dt",
    "default_energy_weight",
    "dissipation",
    "energy",
    "lyapunov_functional",
    "simulate",
    "step_backward_euler",
    "step_trapezoidal",
    "EmptySpectrum",
    "FactorizationFailure",
    "NonpositiveParameter",
    "ResolventTable",
    "SpectrumReport",
    "beam_clamped_free_frequencies",
    "eigenvalue_exclusion_determinant",
    "eigenvalues",
    "resolvent_norm",
    "resolvent_sweep",
    "slowest_mode",
    "spectral_abscissa",
    "string_modes_closed_form",
    "DecayCertificate",
    "DecayFit",
    "InvariantResult",
    "LyapunovAudit",
    "NonpositiveEnergy",
    "VerificationReport",
    "WindowTooSmall",
    "certify_decay",
    "cross_validate",
    "fit_decay",
    "lyapunov_audit",
    "render_report",
    "__version__",
]

"""Optically pumped 13C hyperpolarization in NV diamond: simulation and estimates."""

__version__ = "0.1.0"

from .estimates import (
    EnhancementInputs,
    MaterialParams,
    avg_defect_distance,
    diffusion_length,
    enhancement_factor,
    polarized_ratio,
)
from .estimator import ESLACPolarization
from .exceptions import (
    ConfigError,
    DomainError,
    NonUniqueSteadyStateError,
    NVHyperpolError,
    PropagationWarning,
    SingularMatrixError,
    SolverError,
)
from .hamiltonian import (
    REFERENCE_TENSOR,
    FieldVector,
    HyperfineTensor,
    SpinSystemParams,
    build_hamiltonian,
    lac_field,
    level_diagram,
    load_tensor,
    rotate_tensor,
)
from .lindblad import (
    CollapseSpec,
    Liouvillian,
    PumpModel,
    build_collapse_ops,
    build_liouvillian,
    model_liouvillian,
    propagate,
    propagate_many,
    steady_state,
)
from .odmr import (
    CrystalFrame,
    alignment_spread,
    angle_scan,
    angular_sensitivity,
    transition_frequencies,
)
from .plotdata import emit_plot_data, format_plot_data, read_plot_data
from .spin import eig_hermitian, kron, solve_linear, spin_operators
from .sweep import (
    BuildupResult,
    SweepConfig,
    SweepResult,
    buildup_curve,
    buildup_timescales,
    field_grid,
    field_sweep,
    find_zero_crossings,
    nuclear_polarization,
    optimal_field,
    random_orientations,
)

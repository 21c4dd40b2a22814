"""Mean-field dynamics of discretized planar rotators.

The model lives on the probability simplex over q equal arcs of the circle.
Everything follows from per-arc Gibbs integrals under a self-consistent
magnetization: jump rates, the simplex flow and its periodic orbit of
discretized Gibbs measures, the free-energy Lyapunov function, the linear
stability picture at the equidistribution, the path rate function, and a
finite-N stochastic simulator converging to the flow.
"""

from .consistency import (
    FixedPointReport,
    Regime,
    RegimeLabel,
    checkerboard_fixed_points,
    checkerboard_response,
    classify_regime,
    continuous_order_parameter,
    find_fixed_points,
    magnetization,
    regime_grid,
    solve_magnetization,
)
from .dynamics import FlowTrajectory, integrate_flow, rates, vector_field
from .energy import (
    MINUS_INF,
    FreeEnergyValue,
    OrbitPoint,
    discretize_gibbs,
    free_energy,
    free_energy_offset,
    free_energy_rate,
    orbit_distance,
    orbit_distance_refined,
    orbit_samples,
    orbit_segment,
)
from .errors import ConvergenceError, SingularLinearizationError, StiffnessError
from .ldp import LagrangianValue, hamiltonian, hamiltonian_gradient, lagrangian
from .model import (
    Arc,
    ArcCovariance,
    ModelParams,
    arc,
    arc_covariance,
    arc_covariances,
    arc_log_partition,
    arc_log_partitions,
    arc_mean,
    arc_means,
    arc_moments,
    arc_partition_value,
    boundary_angles,
    circle_log_partition,
)
from .simplex import (
    as_simplex,
    cyclic_shift,
    dirac,
    equidistribution,
    fourier_mode,
    tv_distance,
)
from .stability import (
    ManifoldProjectors,
    SpectrumResult,
    UnstableModeReport,
    equidistribution_jacobian,
    equidistribution_spectrum,
    jacobian_at,
    manifold_projectors,
    match_spectra,
    unstable_mode_check,
)
from .stochastic import (
    JumpPath,
    LlnTable,
    OccupationState,
    lln_error,
    round_to_counts,
    simulate_path,
    sup_tv_error,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

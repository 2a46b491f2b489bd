"""Quantum Rabi model at large atom-light frequency ratio.

Classical mean-field dynamics (Poincare sections) next to exact quantum
evolution on a truncated Fock basis, with the long-time chaos diagnostics
that connect the two pictures: linear entanglement entropy, Husimi Q
distributions, and spin variance, plus phase-space sweep maps and a batch
CLI for reproducible runs.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConfigError,
    DomainError,
    EigensolverError,
    NumericalError,
    RabiChaosError,
    ShellError,
    SingularityError,
    StepSizeError,
    TruncationError,
)
from .model import (  # noqa: F401
    DEFAULT_ENERGY,
    DEFAULT_PARAMS,
    NAMED_POINTS,
    CoherentParams,
    ModelParams,
    PhasePoint,
    bloch_tau,
    classical_energy,
    coherent_labels,
    glauber_beta,
    resolve_point,
    solve_p2,
)
from .classical import (  # noqa: F401
    KERNEL_NAME,
    SectionPointSet,
    Trajectory,
    classify_orbit,
    closed_curve_residual,
    convex_hull_area,
    eom,
    integrate,
    poincare_section,
)
from .quantum import (  # noqa: F401
    FockConfig,
    Hamiltonian,
    SpectralDecomposition,
    build_hamiltonian,
    coherent_product_state,
    diagonalize,
    evolve,
    evolve_series,
    expect_photon_number,
    expect_sigma_z,
    purity,
    reduce_atom,
    reduce_field,
    state_energy,
)
from .diagnostics import (  # noqa: F401
    HusimiField,
    PhaseGrid,
    TimeSeries,
    effective_support,
    entropy_time_series,
    husimi_q,
    linear_entropy,
    photon_convergence,
    spin_variance,
    spin_variance_series,
    supnorm_rel,
    time_average,
)
from .maps import (  # noqa: F401
    HeatMap,
    SectionGrid,
    entropy_map,
    section_grid,
    spin_variance_map,
)
from .config import RunConfig, parse_config, serialize_config  # noqa: F401

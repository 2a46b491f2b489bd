"""Long-time chaos diagnostics of the quantum evolution.

Three observables separate chaotic from regular initial conditions at long
times: the linear entanglement entropy S = 1 - Tr rho_atom^2 of the reduced
atom state, the Husimi distribution Q(q2, p2) = <beta| rho_field |beta> / pi
of the reduced field state, and the spin variance 1 - <sz>^2.  All of them
ride on the spectral propagator, so a whole time series costs one
matrix-matrix product.

Also here: the photon-truncation convergence study (evolving one initial
state at several Fock cutoffs and comparing the <a'a> curves), which is how
the usable cutoff is established before any long-time run is trusted.
"""

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, TruncationError
from .model import ModelParams, coherent_labels
from .quantum import (
    FockConfig,
    SpectralDecomposition,
    build_hamiltonian,
    coherent_product_state,
    diagonalize,
    evolve_series,
    expect_sigma_z,
    purity,
)

log = logging.getLogger(__name__)

NEGATIVE_Q_TOL = -1e-12
BOUNDARY_MASS_TOL = 1e-4


@dataclass(frozen=True)
class TimeSeries:
    """Real observable sampled on a uniform time grid starting at t = 0."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise DomainError("times and values must have equal length")


def uniform_times(t_end: float, dt: float) -> np.ndarray:
    """Grid 0, dt, 2 dt, ... up to (and including, when commensurate) t_end."""
    if t_end < 0 or dt <= 0:
        raise DomainError("need t_end >= 0 and dt > 0")
    n = int(np.floor(t_end / dt + 1e-9))
    return np.arange(n + 1) * dt


def linear_entropy(rho: np.ndarray) -> float:
    """S = 1 - Tr rho^2; zero for pure states, 0.5 for a maximally mixed qubit."""
    return 1.0 - purity(rho)


def observable_series(psi0: np.ndarray, sd: SpectralDecomposition,
                      times) -> dict:
    """Entropy, photon number and <sz> along one evolution, sharing the
    propagation (columns of a single evolve_series call)."""
    states = evolve_series(sd, psi0, times)
    n = sd.fock.n_max + 1
    a = states.reshape(2, n, -1)
    pop2 = np.abs(a) ** 2
    p_lower = pop2[0].sum(axis=0)
    p_upper = pop2[1].sum(axis=0)
    coh = (a[0] * a[1].conj()).sum(axis=0)
    pur = p_lower ** 2 + p_upper ** 2 + 2.0 * np.abs(coh) ** 2
    photon = np.arange(n) @ (pop2[0] + pop2[1])
    sz = p_upper - p_lower
    return {
        "entropy": 1.0 - pur,
        "photon": photon,
        "sigma_z": sz,
        "spin_variance": 1.0 - sz ** 2,
    }


def entropy_time_series(psi0: np.ndarray, sd: SpectralDecomposition,
                        t_end: float, dt: float) -> TimeSeries:
    """S(t) of the atom reduction on the uniform grid (0..t_end step dt)."""
    times = uniform_times(t_end, dt)
    return TimeSeries(times, observable_series(psi0, sd, times)["entropy"])


def spin_variance(psi: np.ndarray) -> float:
    """1 - <sz>^2 (sz^2 is the identity on a two-level system)."""
    return 1.0 - expect_sigma_z(psi) ** 2


def spin_variance_series(psi0: np.ndarray, sd: SpectralDecomposition,
                         t_end: float, dt: float) -> TimeSeries:
    times = uniform_times(t_end, dt)
    return TimeSeries(times,
                      observable_series(psi0, sd, times)["spin_variance"])


def time_average(ts: TimeSeries, t1: float, t2: float) -> float:
    """Trapezoidal mean of the series over the window [t1, t2]."""
    if t2 < t1:
        raise DomainError("need t2 >= t1")
    eps = 1e-9 * max(1.0, abs(t2))
    mask = (ts.times >= t1 - eps) & (ts.times <= t2 + eps)
    if not np.any(mask):
        raise DomainError(f"window [{t1}, {t2}] contains no samples")
    t = ts.times[mask]
    v = ts.values[mask]
    if len(t) == 1:
        return float(v[0])
    return float(np.trapezoid(v, t) / (t[-1] - t[0]))


@dataclass(frozen=True)
class PhaseGrid:
    """Rectangular (q2, p2) grid for Husimi evaluation."""

    q_min: float = -10.0
    q_max: float = 10.0
    n_q: int = 201
    p_min: float = -10.0
    p_max: float = 10.0
    n_p: int = 201

    def __post_init__(self):
        if self.n_q < 2 or self.n_p < 2:
            raise DomainError("grid needs at least 2 nodes per axis")
        if self.q_max <= self.q_min or self.p_max <= self.p_min:
            raise DomainError("grid ranges must be increasing")

    @property
    def q_axis(self) -> np.ndarray:
        return np.linspace(self.q_min, self.q_max, self.n_q)

    @property
    def p_axis(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_p)

    @property
    def cell_area(self) -> float:
        return ((self.q_max - self.q_min) / (self.n_q - 1)
                * (self.p_max - self.p_min) / (self.n_p - 1))


DEFAULT_HUSIMI_GRID = PhaseGrid()


@dataclass(frozen=True)
class HusimiField:
    """Q values on a PhaseGrid: values[i, j] = Q(q_axis[i], p_axis[j])."""

    grid: PhaseGrid
    values: np.ndarray
    norm: float           # (1/2) sum Q dq dp, should be 1 on an adequate grid
    boundary_mass: float  # fraction of the mass on the outermost node ring


def husimi_q(rho_field: np.ndarray, grid: PhaseGrid = DEFAULT_HUSIMI_GRID
             ) -> HusimiField:
    """Husimi distribution of a field density matrix on a phase-space grid.

    At each node the truncated coherent vector is built with the same
    recurrence as the initial states and contracted as <beta|rho|beta> / pi.
    Warns when more than BOUNDARY_MASS_TOL of the mass sits on the outermost
    ring, i.e. the grid clips the state.
    """
    rho_field = np.asarray(rho_field)
    n = rho_field.shape[0]
    qq, pp = np.meshgrid(grid.q_axis, grid.p_axis, indexing="ij")
    beta = (qq + 1j * pp).ravel() / np.sqrt(2.0)
    coh = np.empty((beta.size, n), dtype=complex)
    coh[:, 0] = np.exp(-0.5 * np.abs(beta) ** 2)
    for k in range(n - 1):
        coh[:, k + 1] = coh[:, k] * beta / np.sqrt(k + 1.0)
    q = np.einsum("bn,bn->b", coh.conj() @ rho_field, coh).real / np.pi
    worst = q.min()
    if worst < NEGATIVE_Q_TOL:
        warnings.warn(
            f"Husimi values as low as {worst:.3e}; density matrix is not "
            "positive semidefinite at working precision", stacklevel=2)
    q = np.clip(q, 0.0, None).reshape(grid.n_q, grid.n_p)
    total = float(q.sum())
    edge = float(q[0, :].sum() + q[-1, :].sum()
                 + q[1:-1, 0].sum() + q[1:-1, -1].sum())
    boundary = edge / total if total > 0 else 0.0
    if boundary > BOUNDARY_MASS_TOL:
        warnings.warn(
            f"{boundary:.2e} of the Husimi mass lies on the grid boundary; "
            "enlarge the grid", stacklevel=2)
    norm = 0.5 * total * grid.cell_area
    return HusimiField(grid=grid, values=q, norm=norm, boundary_mass=boundary)


def effective_support(field: HusimiField) -> float:
    """Number of grid cells the distribution effectively occupies.

    Inverse participation ratio of the node weights p_k = Q_k / sum Q: a
    distribution spread over m cells scores about m, a concentrated one
    scores few.  Used for the chaotic-vs-regular spread ordering at long
    times.
    """
    w = field.values.ravel()
    total = w.sum()
    if total <= 0:
        return 0.0
    p = w / total
    return float(1.0 / np.sum(p ** 2))


@dataclass(frozen=True)
class PhotonRun:
    """Photon-number evolution at one Fock cutoff (or the failure reason)."""

    n_max: int
    series: TimeSeries | None
    error: str | None


def photon_convergence(point, n_list, t_end: float, dt: float,
                       params: ModelParams, tail_tol: float = 1e-8) -> list:
    """<a'a>(t) for one initial point at several Fock cutoffs.

    Each cutoff gets its own Hamiltonian and eigendecomposition.  A cutoff
    too small for the initial coherent tail is reported in the result list
    instead of aborting the sweep.
    """
    labels = coherent_labels(point)
    runs = []
    for n_max in n_list:
        fock = FockConfig(n_max=int(n_max))
        try:
            psi0 = coherent_product_state(labels, fock, tail_tol=tail_tol)
        except TruncationError as exc:
            log.warning("cutoff %d rejected: %s", n_max, exc)
            runs.append(PhotonRun(n_max=int(n_max), series=None,
                                  error=str(exc)))
            continue
        sd = diagonalize(build_hamiltonian(params, fock))
        times = uniform_times(t_end, dt)
        values = observable_series(psi0, sd, times)["photon"]
        runs.append(PhotonRun(n_max=int(n_max),
                              series=TimeSeries(times, values), error=None))
    return runs


def supnorm_rel(a: TimeSeries, b: TimeSeries) -> float:
    """sup_t |a - b| normalized by the largest magnitude either curve reaches."""
    if len(a.times) != len(b.times) or not np.allclose(a.times, b.times):
        raise DomainError("series must share the same time grid")
    scale = max(np.abs(a.values).max(), np.abs(b.values).max())
    if scale == 0:
        return 0.0
    return float(np.abs(a.values - b.values).max() / scale)

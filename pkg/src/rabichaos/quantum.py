"""Exact quantum dynamics on the truncated spin (x) Fock basis.

The Hamiltonian  H = omega/2 sz + omega0 a'a + g (a' + a)(s+ + s-)  is
assembled on the product basis |s, n> with spin-major index s*(n_max+1) + n,
s = 0 for the lower atomic level and 1 for the upper.  In this basis H is
real symmetric, so one dense eigendecomposition gives the exact propagator
for every time and every initial state; phase-space sweeps reuse a single
decomposition across thousands of coherent initial states.

Initial states are products of a Bloch coherent atom state and a Glauber
coherent field state.  Fock amplitudes come from the multiplicative
recurrence c_{n+1} = c_n beta / sqrt(n+1) (never factorials, which overflow
long before n = 150), and the truncated tail mass is a hard precondition:
more than tail_tol of lost norm raises instead of silently renormalizing.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EigensolverError, TruncationError
from .model import CoherentParams, ModelParams

log = logging.getLogger(__name__)

DEFAULT_N_MAX = 150
TAIL_TOL = 1e-8


@dataclass(frozen=True)
class FockConfig:
    """Photon-number truncation: Fock basis |0>..|n_max>."""

    n_max: int = DEFAULT_N_MAX

    def __post_init__(self):
        if self.n_max < 1:
            raise DomainError("n_max must be at least 1")

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)


@dataclass(frozen=True)
class Hamiltonian:
    """Dense Hamiltonian matrix with the parameters it was built from."""

    matrix: np.ndarray
    params: ModelParams
    fock: FockConfig


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hamiltonian."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    fock: FockConfig


def build_hamiltonian(params: ModelParams, fock: FockConfig) -> Hamiltonian:
    """Assemble H on the truncated basis (a'|n_max> is truncated to zero)."""
    n = fock.n_max + 1
    ladder = np.zeros((n, n))
    rt = np.sqrt(np.arange(1, n))
    ladder[np.arange(n - 1), np.arange(1, n)] = rt   # annihilation a
    x_op = ladder + ladder.T                          # a' + a
    number = np.diag(np.arange(n, dtype=float))
    sz = np.diag([-1.0, 1.0])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    eye2 = np.eye(2)
    eye_f = np.eye(n)
    matrix = (0.5 * params.omega * np.kron(sz, eye_f)
              + params.omega0 * np.kron(eye2, number)
              + params.g * np.kron(sx, x_op))
    return Hamiltonian(matrix=matrix, params=params, fock=fock)


def diagonalize(ham: Hamiltonian) -> SpectralDecomposition:
    """Full symmetric eigendecomposition (the exact propagator backend)."""
    try:
        evals, evecs = np.linalg.eigh(ham.matrix)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigendecomposition failed: {exc}") from exc
    return SpectralDecomposition(eigenvalues=evals, eigenvectors=evecs,
                                 fock=ham.fock)


def glauber_amplitudes(beta: complex, n_max: int) -> np.ndarray:
    """Fock amplitudes <n|beta> for n = 0..n_max by stable recurrence."""
    amps = np.empty(n_max + 1, dtype=complex)
    amps[0] = np.exp(-0.5 * abs(beta) ** 2)
    for n in range(n_max):
        amps[n + 1] = amps[n] * beta / np.sqrt(n + 1.0)
    return amps


def coherent_product_state(cp: CoherentParams, fock: FockConfig,
                           tail_tol: float = TAIL_TOL) -> np.ndarray:
    """Normalized product state |tau> (x) |beta> on the truncated basis.

    The atom part is (1 + |tau|^2)^(-1/2) (|0> + tau |1>); the field part is
    the Glauber expansion cut at n_max.  Raises TruncationError when the cut
    drops more than tail_tol of the field norm; otherwise the lost mass is
    logged and the state renormalized.
    """
    tau, beta = cp.tau, cp.beta
    field = glauber_amplitudes(beta, fock.n_max)
    tail = 1.0 - float(np.sum(np.abs(field) ** 2))
    if tail > tail_tol:
        raise TruncationError(
            f"truncation at n_max={fock.n_max} loses tail mass {tail:.3e} "
            f"(> {tail_tol:.1e}) for |beta|^2 = {abs(beta) ** 2:.4g}")
    atom = np.array([1.0, tau], dtype=complex) / np.sqrt(1.0 + abs(tau) ** 2)
    psi = np.kron(atom, field)
    norm = np.linalg.norm(psi)
    log.debug("coherent state tail mass %.3e, renormalizing by %.3e",
              max(tail, 0.0), abs(1.0 - norm))
    return psi / norm


def evolve(sd: SpectralDecomposition, psi0: np.ndarray, t: float) -> np.ndarray:
    """psi(t) = V exp(-i L t) V' psi0 (exact on the truncated basis)."""
    v = sd.eigenvectors
    if psi0.shape[0] != v.shape[0]:
        raise DomainError(
            f"state dimension {psi0.shape[0]} != basis dimension {v.shape[0]}")
    coeff = v.conj().T @ psi0
    return v @ (np.exp(-1j * sd.eigenvalues * t) * coeff)


def evolve_series(sd: SpectralDecomposition, psi0: np.ndarray,
                  times) -> np.ndarray:
    """States at many times as columns of a (dim, len(times)) array.

    One matrix-matrix product per call; this is the workhorse of the time
    series diagnostics and the sweep maps.
    """
    times = np.asarray(times, dtype=float)
    v = sd.eigenvectors
    if psi0.shape[0] != v.shape[0]:
        raise DomainError(
            f"state dimension {psi0.shape[0]} != basis dimension {v.shape[0]}")
    coeff = v.conj().T @ psi0
    phases = np.exp(np.outer(sd.eigenvalues, -1j * times))
    return v @ (phases * coeff[:, None])


def _split_spin(psi: np.ndarray) -> np.ndarray:
    if psi.ndim != 1 or psi.shape[0] % 2:
        raise DomainError("state vector must have even length 2(n_max+1)")
    return psi.reshape(2, -1)


def expect_photon_number(psi: np.ndarray) -> float:
    """<a'a> = sum_n n (|amp(0,n)|^2 + |amp(1,n)|^2)."""
    a = _split_spin(psi)
    weights = np.arange(a.shape[1])
    return float(np.sum(weights * (np.abs(a) ** 2).sum(axis=0)))


def expect_sigma_z(psi: np.ndarray) -> float:
    """<sz> = P(upper) - P(lower), in [-1, 1]."""
    a = _split_spin(psi)
    pops = (np.abs(a) ** 2).sum(axis=1)
    return float(pops[1] - pops[0])


def state_energy(ham: Hamiltonian, psi: np.ndarray) -> float:
    return float(np.real(np.vdot(psi, ham.matrix @ psi)))


def reduce_atom(psi: np.ndarray) -> np.ndarray:
    """2x2 reduced density matrix of the atom (partial trace over the field)."""
    a = _split_spin(psi)
    return a @ a.conj().T


def reduce_field(psi: np.ndarray) -> np.ndarray:
    """(n_max+1)^2 reduced density matrix of the field (trace over the spin)."""
    a = _split_spin(psi)
    return a.T @ a.conj()


def purity(rho: np.ndarray) -> float:
    """Tr rho^2 = sum |rho_ij|^2 (the two agree for Hermitian rho)."""
    return float(np.sum(np.abs(rho) ** 2))

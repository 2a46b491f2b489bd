"""Model parameters, phase-space coordinates, and the mean-field energy surface.

A two-level atom with level splitting ``omega`` couples to a single cavity
mode of frequency ``omega0`` with dipolar strength ``g`` (hbar = 1).  The
classical phase space is (q1, p1, q2, p2): atomic quadratures first, cavity
quadratures second, with q2 = (a' + a)/sqrt(2) and p2 = i(a' - a)/sqrt(2).

Averaging the Hamiltonian over a product of Bloch and Glauber coherent states
labelled by

    tau  = (q1 + i p1) / sqrt(2 - q1^2 - p1^2)
    beta = (q2 + i p2) / sqrt(2)

gives the mean-field energy surface

    H_cl = omega/2 (q1^2 + p1^2 - 1) + omega0/2 (q2^2 + p2^2)
           + g q1 q2 sqrt(4 - 2(q1^2 + p1^2))

Atomic points live on the open disk q1^2 + p1^2 < 2; the rim maps to the
Bloch-sphere pole where the tau label diverges.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError, ShellError

# Labels this close to the disk rim are rejected rather than clamped: a
# clamped point would land off the requested energy shell.
ATOM_DISK_EDGE = 2.0 - 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the model (all in units of omega0 when omega0=1)."""

    omega: float = 18.0
    omega0: float = 1.0
    g: float = 4.0

    def __post_init__(self):
        if self.omega0 <= 0 or self.omega <= 0:
            raise DomainError("frequencies omega and omega0 must be positive")
        if self.g < 0:
            raise DomainError("coupling g must be nonnegative")

    @property
    def ratio(self) -> float:
        """Atom-light frequency ratio eta = omega/omega0."""
        return self.omega / self.omega0


class PhasePoint(NamedTuple):
    q1: float
    p1: float
    q2: float
    p2: float

    @property
    def atom_radius2(self) -> float:
        return self.q1 * self.q1 + self.p1 * self.p1


class CoherentParams(NamedTuple):
    """Coherent-state labels: Bloch tau for the atom, Glauber beta for the field."""

    tau: complex
    beta: complex


DEFAULT_PARAMS = ModelParams()
DEFAULT_ENERGY = 14.0

# Two bundled reference points on the E=14 shell of the default parameters:
# R1 sits on a stable island of the q2=0 section, C1 in the chaotic sea.
NAMED_POINTS = {
    "R1": PhasePoint(0.86853, -1.02681, 0.0, 3.66657),
    "C1": PhasePoint(-0.2, 0.0, 0.0, 6.72904),
}


def _as_coords(point) -> tuple:
    q1, p1, q2, p2 = point
    return float(q1), float(p1), float(q2), float(p2)


def classical_energy(point, params: ModelParams = DEFAULT_PARAMS) -> float:
    """Mean-field energy H_cl at a phase-space point.

    Raises DomainError when the atomic coordinates leave the disk
    q1^2 + p1^2 <= 2, where the square root turns imaginary.
    """
    q1, p1, q2, p2 = _as_coords(point)
    r2 = q1 * q1 + p1 * p1
    if r2 > 2.0:
        raise DomainError(f"atomic point outside the disk: q1^2+p1^2 = {r2}")
    s = math.sqrt(4.0 - 2.0 * r2)
    return (
        0.5 * params.omega * (r2 - 1.0)
        + 0.5 * params.omega0 * (q2 * q2 + p2 * p2)
        + params.g * q1 * q2 * s
    )


def solve_p2(q1: float, p1: float, q2: float, energy: float,
             params: ModelParams = DEFAULT_PARAMS) -> float:
    """Nonnegative field momentum placing (q1, p1, q2, .) on the given energy shell.

    Solves H_cl(q1, p1, q2, p2) = energy for the p2 >= 0 branch, the one the
    section convention (q2 = 0, p2 > 0) needs.  Raises ShellError when the
    shell is unreachable and DomainError for invalid atomic coordinates.
    """
    q1, p1, q2 = float(q1), float(p1), float(q2)
    r2 = q1 * q1 + p1 * p1
    if r2 > ATOM_DISK_EDGE:
        raise DomainError(f"atomic point outside the disk: q1^2+p1^2 = {r2}")
    s = math.sqrt(4.0 - 2.0 * r2)
    residual = (
        energy
        - 0.5 * params.omega * (r2 - 1.0)
        - 0.5 * params.omega0 * q2 * q2
        - params.g * q1 * q2 * s
    )
    if residual < 0.0:
        raise ShellError(
            f"no p2 solution at (q1={q1}, p1={p1}, q2={q2}) for E={energy}"
        )
    return math.sqrt(2.0 * residual / params.omega0)


def bloch_tau(q1: float, p1: float) -> complex:
    """Bloch coherent-state label tau = (q1 + i p1)/sqrt(2 - q1^2 - p1^2)."""
    r2 = q1 * q1 + p1 * p1
    if r2 > ATOM_DISK_EDGE:
        raise DomainError(f"tau undefined at/beyond the disk rim: q1^2+p1^2 = {r2}")
    return complex(q1, p1) / math.sqrt(2.0 - r2)


def glauber_beta(q2: float, p2: float) -> complex:
    """Glauber label beta = (q2 + i p2)/sqrt(2); |beta|^2 = (q2^2 + p2^2)/2."""
    return complex(q2, p2) / math.sqrt(2.0)


def coherent_labels(point) -> CoherentParams:
    """Coherent-state labels (tau, beta) of a phase-space point."""
    q1, p1, q2, p2 = _as_coords(point)
    return CoherentParams(bloch_tau(q1, p1), glauber_beta(q2, p2))


def resolve_point(spec) -> PhasePoint:
    """Turn a point name ('R1', 'C1') or a 4-sequence into a validated PhasePoint."""
    if isinstance(spec, str):
        try:
            return NAMED_POINTS[spec]
        except KeyError:
            raise DomainError(
                f"unknown point name {spec!r}; known: {sorted(NAMED_POINTS)}"
            ) from None
    point = PhasePoint(*_as_coords(spec))
    if point.atom_radius2 > ATOM_DISK_EDGE:
        raise DomainError(
            f"atomic point outside the disk: q1^2+p1^2 = {point.atom_radius2}"
        )
    return point

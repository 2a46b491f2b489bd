"""Energy surface, shell solving, and coherent-state labels."""

import math

import numpy as np
import pytest

from rabichaos.errors import DomainError, ShellError
from rabichaos.model import (
    DEFAULT_PARAMS,
    ModelParams,
    PhasePoint,
    bloch_tau,
    classical_energy,
    coherent_labels,
    glauber_beta,
    resolve_point,
    solve_p2,
)

from conftest import C1, R1, random_disk_points


def test_reference_points_sit_on_the_14_shell():
    assert classical_energy(R1, DEFAULT_PARAMS) == pytest.approx(14.0, abs=1e-3)
    assert classical_energy(C1, DEFAULT_PARAMS) == pytest.approx(14.0, abs=1e-3)


def test_origin_energy_is_minus_half_omega():
    for omega in (18.0, 5.0, 1.0):
        params = ModelParams(omega=omega, omega0=1.0, g=4.0)
        assert classical_energy((0, 0, 0, 0), params) == pytest.approx(-omega / 2)


def test_energy_outside_disk_raises():
    with pytest.raises(DomainError):
        classical_energy((1.5, 1.0, 0, 0), DEFAULT_PARAMS)


def test_params_validation():
    with pytest.raises(DomainError):
        ModelParams(omega=-1.0)
    with pytest.raises(DomainError):
        ModelParams(omega0=0.0)
    with pytest.raises(DomainError):
        ModelParams(g=-0.1)
    assert ModelParams().ratio == 18.0


def test_solve_p2_reference_values():
    assert solve_p2(-0.2, 0.0, 0.0, 14.0, DEFAULT_PARAMS) == pytest.approx(
        6.72904, abs=1e-4)
    assert solve_p2(0.86853, -1.02681, 0.0, 14.0, DEFAULT_PARAMS) == pytest.approx(
        3.66657, abs=1e-4)
    # at the decoupled minimum the root is exactly zero
    assert solve_p2(0.0, 0.0, 0.0, -9.0, DEFAULT_PARAMS) == 0.0


def test_solve_p2_below_shell_raises():
    with pytest.raises(ShellError):
        solve_p2(0.0, 0.0, 0.0, -20.0, DEFAULT_PARAMS)


def test_solve_p2_round_trips_through_the_energy():
    rng = np.random.default_rng(7)
    count = 0
    while count < 1000:
        q1, p1 = random_disk_points(rng, 1)[0]
        q2 = rng.uniform(-5, 5)
        r2 = q1 * q1 + p1 * p1
        s = math.sqrt(4 - 2 * r2)
        floor = (9.0 * (r2 - 1.0) + 0.5 * q2 * q2 + 4.0 * q1 * q2 * s)
        energy = floor + rng.uniform(0.01, 40.0)
        p2 = solve_p2(q1, p1, q2, energy, DEFAULT_PARAMS)
        assert p2 >= 0.0
        back = classical_energy((q1, p1, q2, p2), DEFAULT_PARAMS)
        assert abs(back - energy) <= 1e-10 * max(1.0, abs(energy))
        count += 1


def test_bloch_tau_values():
    assert bloch_tau(0.0, 0.0) == 0.0
    assert bloch_tau(1.0, 0.0) == pytest.approx(1.0)
    # -0.2 / sqrt(1.96) evaluated directly
    assert bloch_tau(-0.2, 0.0) == pytest.approx(-0.2 / math.sqrt(1.96),
                                                 abs=1e-12)
    with pytest.raises(DomainError):
        bloch_tau(math.sqrt(2.0), 0.0)


def test_glauber_beta_values():
    assert glauber_beta(0.0, 0.0) == 0.0
    assert glauber_beta(math.sqrt(2.0), 0.0) == pytest.approx(1.0)
    beta = glauber_beta(0.0, 6.72904)
    assert beta.real == 0.0
    assert beta.imag == pytest.approx(6.72904 / math.sqrt(2.0), abs=1e-12)
    assert abs(beta) ** 2 == pytest.approx(6.72904 ** 2 / 2.0, rel=1e-12)


def test_energy_equals_mean_field_assembly():
    """Direct surface vs the expectation assembled from the atom/field
    coherent averages: <H> = w/2 <sz> + w0 |beta|^2 + g (beta+beta*)(tau+tau*)
    / (1+|tau|^2).  Identity must hold to near machine precision."""
    rng = np.random.default_rng(11)
    params = DEFAULT_PARAMS
    for q1, p1 in random_disk_points(rng, 300):
        q2, p2 = rng.uniform(-6, 6, size=2)
        tau, beta = coherent_labels((q1, p1, q2, p2))
        sz = -(1.0 - abs(tau) ** 2) / (1.0 + abs(tau) ** 2)
        assembled = (0.5 * params.omega * sz
                     + params.omega0 * abs(beta) ** 2
                     + params.g * (2.0 * beta.real)
                     * (2.0 * tau.real) / (1.0 + abs(tau) ** 2))
        direct = classical_energy((q1, p1, q2, p2), params)
        assert abs(assembled - direct) <= 1e-12 * max(1.0, abs(direct))


def test_bloch_sigma_z_identity():
    rng = np.random.default_rng(13)
    for q1, p1 in random_disk_points(rng, 500):
        tau = bloch_tau(q1, p1)
        sz = -(1.0 - abs(tau) ** 2) / (1.0 + abs(tau) ** 2)
        assert abs(sz - (q1 * q1 + p1 * p1 - 1.0)) <= 1e-12


def test_boundary_ring_rejected_not_clamped():
    r = math.sqrt(2.0 - 1e-13)
    with pytest.raises(DomainError):
        bloch_tau(r, 0.0)
    with pytest.raises(DomainError):
        solve_p2(r, 0.0, 0.0, 14.0, DEFAULT_PARAMS)


def test_resolve_point():
    assert resolve_point("R1") == R1
    assert resolve_point((0.1, 0.2, 0.3, 0.4)) == PhasePoint(0.1, 0.2, 0.3, 0.4)
    with pytest.raises(DomainError):
        resolve_point("X9")
    with pytest.raises(DomainError):
        resolve_point((1.5, 1.0, 0.0, 0.0))

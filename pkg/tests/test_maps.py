"""Section grids and the time-averaged sweep maps."""

import numpy as np
import pytest

from rabichaos.maps import (
    CELL_NO_SOLUTION,
    CELL_OUTSIDE_DISK,
    CELL_PRESENT,
    entropy_map,
    section_grid,
    spin_variance_map,
)
from rabichaos.model import DEFAULT_PARAMS, ModelParams, classical_energy, coherent_labels
from rabichaos.quantum import FockConfig, build_hamiltonian, coherent_product_state, diagonalize
from rabichaos.diagnostics import spin_variance


def test_section_grid_reference_node():
    grid = section_grid((0.86853, 0.86853), (-1.02681, -1.02681), (1, 1),
                        14.0, DEFAULT_PARAMS)
    assert grid.status[0, 0] == CELL_PRESENT
    assert grid.p2[0, 0] == pytest.approx(3.66657, abs=1e-4)
    point = grid.cell_point(0, 0)
    assert classical_energy(point, DEFAULT_PARAMS) == pytest.approx(
        14.0, abs=1e-10 * 14.0)


def test_section_grid_markers():
    grid = section_grid((-1.5, 1.5), (-1.5, 1.5), (5, 5), 14.0,
                        DEFAULT_PARAMS)
    assert grid.status[0, 0] == CELL_OUTSIDE_DISK       # corner (-1.5,-1.5)
    assert grid.status[2, 2] == CELL_PRESENT            # origin
    low = section_grid((0.0, 0.0), (0.0, 0.0), (1, 1), -20.0, DEFAULT_PARAMS)
    assert low.status[0, 0] == CELL_NO_SOLUTION


def test_section_grid_cells_sit_on_the_shell():
    grid = section_grid((-1.2, 1.2), (-1.2, 1.2), (7, 7), 14.0,
                        DEFAULT_PARAMS)
    for i, j in grid.present_cells():
        e = classical_energy(grid.cell_point(i, j), DEFAULT_PARAMS)
        assert abs(e - 14.0) <= 1e-10 * 14.0


@pytest.fixture(scope="module")
def small_sweep(sd150, fock150):
    grid = section_grid((-0.9, 0.95), (-0.9, 0.95), (4, 4), 14.0,
                        DEFAULT_PARAMS)
    heat_s = entropy_map(grid, sd150, fock150, 100.0, 0.5, workers=2)
    heat_v = spin_variance_map(grid, sd150, fock150, 100.0, 0.5, workers=2)
    return grid, heat_s, heat_v


def test_map_values_within_bounds(small_sweep):
    _, heat_s, heat_v = small_sweep
    s = heat_s.values[~np.isnan(heat_s.values)]
    v = heat_v.values[~np.isnan(heat_v.values)]
    assert s.size > 0 and v.size > 0
    assert s.min() >= 0.0 and s.max() <= 0.5
    assert v.min() >= 0.0 and v.max() <= 1.0


def test_map_missing_cells_are_nan(small_sweep):
    grid, heat_s, _ = small_sweep
    missing = grid.status != CELL_PRESENT
    assert np.all(np.isnan(heat_s.values[missing]))


def test_map_worker_count_invariance(sd150, fock150):
    grid = section_grid((-0.6, 0.6), (-0.6, 0.6), (3, 3), 14.0,
                        DEFAULT_PARAMS)
    one = entropy_map(grid, sd150, fock150, 50.0, 0.5, workers=1)
    three = entropy_map(grid, sd150, fock150, 50.0, 0.5, workers=3)
    assert np.array_equal(one.values, three.values, equal_nan=True)
    assert np.array_equal(one.status, three.status)


def test_map_zero_when_decoupled():
    params = ModelParams(omega=18.0, omega0=1.0, g=0.0)
    fock = FockConfig(50)
    sd = diagonalize(build_hamiltonian(params, fock))
    grid = section_grid((-0.5, 0.5), (-0.5, 0.5), (3, 3), 10.0, params)
    heat = entropy_map(grid, sd, fock, 20.0, 0.5)
    present = heat.values[~np.isnan(heat.values)]
    assert np.abs(present).max() <= 1e-10


def test_single_sample_spin_average_is_initial_value(sd150, fock150):
    # T -> 0 limit: the average collapses to the t=0 spin variance,
    # 1 - (q1^2 + p1^2 - 1)^2 at the chaotic reference point
    grid = section_grid((-0.2, -0.2), (0.0, 0.0), (1, 1), 14.0,
                        DEFAULT_PARAMS)
    heat = spin_variance_map(grid, sd150, fock150, 0.0, 0.5)
    assert heat.values[0, 0] == pytest.approx(0.0784, abs=1e-6)
    psi = coherent_product_state(coherent_labels(grid.cell_point(0, 0)),
                                 fock150)
    assert spin_variance(psi) == pytest.approx(0.0784, abs=1e-6)


def test_reference_cells_order_correctly(sd150, fock150):
    # single-cell grids pinned exactly at the two reference points
    sea = section_grid((-0.2, -0.2), (0.0, 0.0), (1, 1), 14.0,
                       DEFAULT_PARAMS)
    island = section_grid((0.86853, 0.86853), (-1.02681, -1.02681), (1, 1),
                          14.0, DEFAULT_PARAMS)
    values = {}
    for name, grid in (("sea", sea), ("island", island)):
        values[name] = (
            entropy_map(grid, sd150, fock150, 500.0, 0.5).values[0, 0],
            spin_variance_map(grid, sd150, fock150, 500.0, 0.5).values[0, 0],
        )
    assert values["sea"][0] > values["island"][0]
    assert values["sea"][1] > values["island"][1]


def test_present_cells_share_the_quantum_shell(sd150, fock150):
    from rabichaos.quantum import coherent_product_state, state_energy
    from rabichaos.quantum import build_hamiltonian
    ham = build_hamiltonian(DEFAULT_PARAMS, fock150)
    grid = section_grid((-1.0, 1.0), (-1.0, 1.0), (3, 3), 14.0,
                        DEFAULT_PARAMS)
    for cell in grid.present_cells():
        psi = coherent_product_state(
            coherent_labels(grid.cell_point(*cell)), fock150)
        assert state_energy(ham, psi) == pytest.approx(14.0, abs=1e-6)


def test_map_truncation_failures_are_recorded():
    fock = FockConfig(40)
    sd = diagonalize(build_hamiltonian(DEFAULT_PARAMS, fock))
    # cells near the origin need n ~ 23 photons on the 14-shell: cutoff 40
    # is too small for them
    grid = section_grid((-0.1, 0.1), (-0.1, 0.1), (2, 2), 14.0,
                        DEFAULT_PARAMS)
    heat = entropy_map(grid, sd, fock, 5.0, 0.5)
    assert len(heat.errors) == 4
    assert np.all(np.isnan(heat.values))

"""Phase-space sweep maps: time-averaged diagnostics over a section grid.

A rectangular (q1, p1) grid is lifted onto the energy shell through the
section convention (q2 = 0, p2 > 0 solved per node); nodes outside the
atomic disk or off the shell are carried as missing cells with a reason, so
a rendered map distinguishes unreachable regions from low values.  Every
present cell then evolves the corresponding coherent state under one shared
eigendecomposition and records the time average of a diagnostic, giving the
heatmaps that are compared against the classical section structure.

Cells are independent tasks on a thread pool (the heavy part is BLAS, which
releases the GIL); results are keyed by cell index, so the map is identical
for any worker count.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShellError, TruncationError
from .model import ATOM_DISK_EDGE, ModelParams, PhasePoint, coherent_labels, solve_p2
from .quantum import FockConfig, SpectralDecomposition, coherent_product_state
from .diagnostics import TimeSeries, observable_series, time_average, uniform_times

log = logging.getLogger(__name__)

CELL_PRESENT = 0
CELL_OUTSIDE_DISK = 1
CELL_NO_SOLUTION = 2
CELL_ERROR = 3

STATUS_NAMES = {
    CELL_PRESENT: "present",
    CELL_OUTSIDE_DISK: "outside-disk",
    CELL_NO_SOLUTION: "no-solution",
    CELL_ERROR: "error",
}


@dataclass(frozen=True)
class SectionGrid:
    """Section-constrained initial conditions on a (q1, p1) lattice.

    p2[i, j] holds the shell-solving field momentum of node
    (q1_axis[i], p1_axis[j]) where status[i, j] == CELL_PRESENT, NaN
    elsewhere.
    """

    q1_axis: np.ndarray
    p1_axis: np.ndarray
    p2: np.ndarray
    status: np.ndarray
    energy: float
    params: ModelParams

    def cell_point(self, i: int, j: int) -> PhasePoint:
        if self.status[i, j] != CELL_PRESENT:
            raise DomainError(
                f"cell ({i}, {j}) is {STATUS_NAMES[int(self.status[i, j])]}")
        return PhasePoint(float(self.q1_axis[i]), float(self.p1_axis[j]),
                          0.0, float(self.p2[i, j]))

    def present_cells(self):
        idx = np.argwhere(self.status == CELL_PRESENT)
        return [(int(i), int(j)) for i, j in idx]


@dataclass(frozen=True)
class HeatMap:
    """Per-cell real values aligned with a SectionGrid; NaN where missing."""

    q1_axis: np.ndarray
    p1_axis: np.ndarray
    values: np.ndarray
    status: np.ndarray
    observable: str
    t_end: float
    dt: float
    n_max: int
    energy: float
    errors: dict  # (i, j) -> message, for CELL_ERROR cells


def section_grid(q1_range, p1_range, resolution, energy: float,
                 params: ModelParams) -> SectionGrid:
    """Lift a (q1, p1) lattice onto the energy shell at q2 = 0, p2 > 0."""
    n_q1, n_p1 = resolution
    if n_q1 < 1 or n_p1 < 1:
        raise DomainError("grid resolution must be positive")
    q1_axis = np.linspace(q1_range[0], q1_range[1], n_q1)
    p1_axis = np.linspace(p1_range[0], p1_range[1], n_p1)
    p2 = np.full((n_q1, n_p1), np.nan)
    status = np.full((n_q1, n_p1), CELL_PRESENT, dtype=np.int8)
    for i, q1 in enumerate(q1_axis):
        for j, p1 in enumerate(p1_axis):
            if q1 * q1 + p1 * p1 >= ATOM_DISK_EDGE:
                status[i, j] = CELL_OUTSIDE_DISK
                continue
            try:
                p2[i, j] = solve_p2(q1, p1, 0.0, energy, params)
            except ShellError:
                status[i, j] = CELL_NO_SOLUTION
    return SectionGrid(q1_axis=q1_axis, p1_axis=p1_axis, p2=p2,
                       status=status, energy=energy, params=params)


def _cell_average(point, sd, fock, observable, times, t_end, tail_tol):
    psi0 = coherent_product_state(coherent_labels(point), fock,
                                  tail_tol=tail_tol)
    values = observable_series(psi0, sd, times)[observable]
    return time_average(TimeSeries(times, values), 0.0, t_end)


def _sweep(grid: SectionGrid, sd: SpectralDecomposition, fock: FockConfig,
           t_end: float, dt: float, observable: str, workers: int,
           tail_tol: float) -> HeatMap:
    times = uniform_times(t_end, dt)
    values = np.full(grid.status.shape, np.nan)
    status = grid.status.copy()
    errors = {}
    cells = grid.present_cells()

    def run(cell):
        i, j = cell
        try:
            return _cell_average(grid.cell_point(i, j), sd, fock, observable,
                                 times, t_end, tail_tol), None
        except TruncationError as exc:
            return None, str(exc)

    if workers <= 1:
        outcomes = [run(cell) for cell in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, cells))
    for cell, (value, err) in zip(cells, outcomes):
        if err is None:
            values[cell] = value
        else:
            status[cell] = CELL_ERROR
            errors[cell] = err
            log.warning("cell %s failed: %s", cell, err)
    return HeatMap(q1_axis=grid.q1_axis, p1_axis=grid.p1_axis, values=values,
                   status=status, observable=observable, t_end=t_end, dt=dt,
                   n_max=fock.n_max, energy=grid.energy, errors=errors)


def entropy_map(grid: SectionGrid, sd: SpectralDecomposition,
                fock: FockConfig, t_end: float, dt: float, workers: int = 1,
                tail_tol: float = 1e-8) -> HeatMap:
    """Time-averaged linear entanglement entropy over the section grid."""
    return _sweep(grid, sd, fock, t_end, dt, "entropy", workers, tail_tol)


def spin_variance_map(grid: SectionGrid, sd: SpectralDecomposition,
                      fock: FockConfig, t_end: float, dt: float,
                      workers: int = 1, tail_tol: float = 1e-8) -> HeatMap:
    """Time-averaged spin variance over the section grid."""
    return _sweep(grid, sd, fock, t_end, dt, "spin_variance", workers,
                  tail_tol)

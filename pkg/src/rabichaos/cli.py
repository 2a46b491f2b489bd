"""Batch command line: reproducible runs writing CSV/PGM artifacts.

Subcommands: poincare, evolve, entropy, husimi, entropy-map, spin-map,
photon-convergence.  Every run writes a manifest.json next to its artifacts,
also on failure.  Exit status: 0 success, 1 configuration or input error,
2 numerical failure (singularity abort, eigensolver failure, truncation).
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .classical import KERNEL_NAME, poincare_section
from .config import RunConfig, config_as_dict, parse_config
from .diagnostics import (
    TimeSeries,
    husimi_q,
    observable_series,
    photon_convergence,
    supnorm_rel,
    time_average,
    uniform_times,
)
from .errors import ConfigError, DomainError, NumericalError, ShellError
from .maps import STATUS_NAMES, entropy_map, section_grid, spin_variance_map
from .model import classical_energy, solve_p2
from .output import Manifest, write_csv, write_pgm
from .quantum import (
    build_hamiltonian,
    coherent_product_state,
    diagonalize,
    evolve,
    glauber_amplitudes,
    reduce_field,
    state_energy,
)
from .model import coherent_labels

SUBCOMMANDS = ("poincare", "evolve", "entropy", "husimi", "entropy-map",
               "spin-map", "photon-convergence")


def _workers(config: RunConfig) -> int:
    if config.workers > 0:
        return config.workers
    return min(8, os.cpu_count() or 1)


def _tail_mass(beta: complex, n_max: int) -> float:
    amps = glauber_amplitudes(beta, n_max)
    return max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))


def _section_seeds(config: RunConfig):
    """Deterministic seed lattice on the section at the configured shell."""
    n = config.seed_grid
    params = config.params()
    q1s = np.linspace(config.section_q1_min, config.section_q1_max, n)
    p1s = np.linspace(config.section_p1_min, config.section_p1_max, n)
    seeds = []
    for q1 in q1s:
        for p1 in p1s:
            if q1 * q1 + p1 * p1 >= 2.0 - 1e-9:
                continue
            try:
                p2 = solve_p2(q1, p1, 0.0, config.energy, params)
            except ShellError:
                continue
            seeds.append((float(q1), float(p1), 0.0, p2))
    return seeds


def run_poincare(config: RunConfig, out_dir: Path, manifest: Manifest):
    """Section sweep.  A single-orbit run propagates numerical failures
    (exit 2); a lattice sweep isolates them per seed instead — chaotic seeds
    can legitimately wander to the atomic-disk rim, where orbits abort by
    policy, and one such seed must not void a whole survey.  Aborted seeds
    are recorded in the manifest; the run fails only if every seed fails."""
    params = config.params()
    if config.poincare_single:
        starts = [config.resolved_point()]
    else:
        starts = _section_seeds(config)
    if not starts:
        raise ConfigError("no section seeds inside the disk on this shell")

    def run_one(start):
        return poincare_section([start], params,
                                n_crossings=config.crossings,
                                tol=config.tol, t_limit=config.t_limit)[0]

    outcomes = []
    with manifest.stage("integrate"):
        if config.poincare_single:
            outcomes.append((run_one(starts[0]), None))
        else:
            with ThreadPoolExecutor(max_workers=_workers(config)) as pool:
                futures = [pool.submit(run_one, s) for s in starts]
            for fut in futures:
                exc = fut.exception()
                if exc is None:
                    outcomes.append((fut.result(), None))
                elif isinstance(exc, NumericalError):
                    outcomes.append((None, str(exc)))
                else:
                    raise exc
    manifest.diag("kernel", KERNEL_NAME)
    manifest.diag("orbits", [
        {"start": list(map(float, s)),
         **({"error": err} if err is not None else
            {"energy": ps.energy0, "n_crossings": int(ps.n_crossings),
             "truncated": bool(ps.truncated),
             "energy_drift_rel": ps.energy_drift})}
        for s, (ps, err) in zip(starts, outcomes)])
    if all(err is not None for _, err in outcomes):
        raise NumericalError(
            f"all {len(starts)} section seeds failed; first: "
            f"{outcomes[0][1]}")
    rows = []
    for start_index, (ps, err) in enumerate(outcomes):
        if err is not None:
            continue
        for crossing_index, (q1, p1) in enumerate(ps.points):
            rows.append((start_index, crossing_index, q1, p1))
    manifest.output(write_csv(out_dir / "poincare.csv",
                              ("start_index", "crossing_index", "q1", "p1"),
                              rows))


def _evolution_series(config: RunConfig, manifest: Manifest):
    params = config.params()
    fock = config.fock()
    point = config.resolved_point()
    labels = coherent_labels(point)
    with manifest.stage("diagonalize"):
        ham = build_hamiltonian(params, fock)
        sd = diagonalize(ham)
    psi0 = coherent_product_state(labels, fock, tail_tol=config.tail_tol)
    manifest.diag("truncation_tail", _tail_mass(labels.beta, fock.n_max))
    manifest.diag("quantum_energy", state_energy(ham, psi0))
    manifest.diag("classical_energy", classical_energy(point, params))
    times = uniform_times(config.t_end, config.dt)
    with manifest.stage("propagate"):
        series = observable_series(psi0, sd, times)
    return times, series, sd, psi0


def run_evolve(config: RunConfig, out_dir: Path, manifest: Manifest):
    times, series, _, _ = _evolution_series(config, manifest)
    rows = zip(times, series["photon"], series["sigma_z"], series["entropy"])
    manifest.output(write_csv(out_dir / "evolve.csv",
                              ("t", "photon_number", "sigma_z", "entropy"),
                              rows))


def run_entropy(config: RunConfig, out_dir: Path, manifest: Manifest):
    times, series, _, _ = _evolution_series(config, manifest)
    ts = TimeSeries(times, series["entropy"])
    manifest.diag("entropy_time_average", time_average(ts, 0.0, times[-1]))
    manifest.diag("entropy_late_mean",
                  time_average(ts, times[-1] / 2.0, times[-1]))
    manifest.output(write_csv(out_dir / "entropy.csv", ("t", "entropy"),
                              zip(times, series["entropy"])))


def run_husimi(config: RunConfig, out_dir: Path, manifest: Manifest):
    params = config.params()
    fock = config.fock()
    labels = coherent_labels(config.resolved_point())
    grid = config.husimi_grid()
    with manifest.stage("diagonalize"):
        sd = diagonalize(build_hamiltonian(params, fock))
    psi0 = coherent_product_state(labels, fock, tail_tol=config.tail_tol)
    manifest.diag("truncation_tail", _tail_mass(labels.beta, fock.n_max))
    snapshots = []
    for t in config.husimi_times:
        with manifest.stage(f"husimi t={t:g}"):
            rho2 = reduce_field(evolve(sd, psi0, t))
            field = husimi_q(rho2, grid)
        rows = ((q2, p2, field.values[i, j])
                for i, q2 in enumerate(grid.q_axis)
                for j, p2 in enumerate(grid.p_axis))
        path = write_csv(out_dir / f"husimi_t{t:g}.csv", ("q2", "p2", "Q"),
                         rows)
        manifest.output(path)
        snap = {"t": t, "norm": field.norm,
                "boundary_mass": field.boundary_mass}
        if config.pgm:
            pgm_path = out_dir / f"husimi_t{t:g}.pgm"
            snap["pgm_max"] = write_pgm(pgm_path, field.values)
            manifest.output(pgm_path)
        snapshots.append(snap)
    manifest.diag("snapshots", snapshots)


def _run_map(config: RunConfig, out_dir: Path, manifest: Manifest,
             which: str):
    params = config.params()
    fock = config.fock()
    with manifest.stage("diagonalize"):
        sd = diagonalize(build_hamiltonian(params, fock))
    with manifest.stage("section grid"):
        grid = section_grid((config.section_q1_min, config.section_q1_max),
                            (config.section_p1_min, config.section_p1_max),
                            (config.section_n_q1, config.section_n_p1),
                            config.energy, params)
    sweep = entropy_map if which == "entropy" else spin_variance_map
    with manifest.stage("sweep"):
        heat = sweep(grid, sd, fock, config.t_end, config.dt,
                     workers=_workers(config), tail_tol=config.tail_tol)
    counts = {name: int(np.sum(heat.status == code))
              for code, name in STATUS_NAMES.items()}
    manifest.diag("cells", counts)
    manifest.diag("cell_errors",
                  {f"{i},{j}": msg for (i, j), msg in heat.errors.items()})
    present = heat.values[~np.isnan(heat.values)]
    if present.size:
        manifest.diag("value_range", [float(present.min()),
                                      float(present.max())])
    stem = "entropy_map" if which == "entropy" else "spin_map"
    rows = ((q1, p1, heat.values[i, j], STATUS_NAMES[int(heat.status[i, j])])
            for i, q1 in enumerate(heat.q1_axis)
            for j, p1 in enumerate(heat.p1_axis))
    manifest.output(write_csv(out_dir / f"{stem}.csv",
                              ("q1", "p1", "value", "status"), rows))
    if config.pgm:
        pgm_path = out_dir / f"{stem}.pgm"
        manifest.diag("pgm_max", write_pgm(pgm_path, heat.values))
        manifest.output(pgm_path)


def run_entropy_map(config, out_dir, manifest):
    _run_map(config, out_dir, manifest, "entropy")


def run_spin_map(config, out_dir, manifest):
    _run_map(config, out_dir, manifest, "spin_variance")


def run_photon_convergence(config: RunConfig, out_dir: Path,
                           manifest: Manifest):
    point = config.resolved_point()
    with manifest.stage("sweep"):
        runs = photon_convergence(point, config.photon_n_list,
                                  config.photon_t_end, config.photon_dt,
                                  config.params(), tail_tol=config.tail_tol)
    summary = {"runs": [], "pairwise_supnorm_rel": {}}
    for run in runs:
        entry = {"n_max": run.n_max, "error": run.error, "file": None}
        if run.series is not None:
            path = write_csv(out_dir / f"photon_N{run.n_max}.csv",
                             ("t", "photon_number"),
                             zip(run.series.times, run.series.values))
            manifest.output(path)
            entry["file"] = path.name
        summary["runs"].append(entry)
    good = [run for run in runs if run.series is not None]
    for a_idx in range(len(good)):
        for b_idx in range(a_idx + 1, len(good)):
            a, b = good[a_idx], good[b_idx]
            summary["pairwise_supnorm_rel"][f"N{a.n_max}_vs_N{b.n_max}"] = \
                supnorm_rel(a.series, b.series)
    path = out_dir / "photon_summary.json"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    manifest.output(path)
    manifest.diag("pairwise_supnorm_rel", summary["pairwise_supnorm_rel"])


RUNNERS = {
    "poincare": run_poincare,
    "evolve": run_evolve,
    "entropy": run_entropy,
    "husimi": run_husimi,
    "entropy-map": run_entropy_map,
    "spin-map": run_spin_map,
    "photon-convergence": run_photon_convergence,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rabichaos",
        description="Quantum Rabi model: sections, evolutions, chaos maps.")
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None,
                        help="config file (key = value lines)")
    common.add_argument("--out", type=Path, default=Path("rabichaos-out"),
                        help="output directory (created if missing)")
    common.add_argument("--workers", type=int, default=None,
                        help="worker threads (0 = auto)")
    common.add_argument("--point", default=None,
                        help="named point (R1, C1) or q1,p1,q2,p2")
    common.add_argument("--n-max", type=int, default=None,
                        help="Fock truncation")
    common.add_argument("--tmax", type=float, default=None,
                        help="evolution end time")
    common.add_argument("--dt", type=float, default=None,
                        help="evolution sample step")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _config_from_args(args) -> RunConfig:
    if args.config is not None:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        config = parse_config(text)
    else:
        config = RunConfig()
    overrides = {}
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.n_max is not None:
        overrides["n_max"] = args.n_max
    if args.tmax is not None:
        overrides["t_end"] = args.tmax
    if args.dt is not None:
        overrides["dt"] = args.dt
    if args.point is not None:
        text = args.point
        if "," in text:
            parts = text.split(",")
            if len(parts) != 4:
                raise ConfigError("--point needs a name or q1,p1,q2,p2")
            try:
                overrides["point"] = tuple(float(p) for p in parts)
            except ValueError as exc:
                raise ConfigError(f"bad --point: {exc}") from exc
        else:
            overrides["point"] = text
        # an explicit point turns `poincare` into a single-orbit run
        overrides["poincare_single"] = True
    return replace(config, **overrides).validate()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        config = _config_from_args(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = Manifest(args.subcommand, config_as_dict(config), __version__)
    try:
        RUNNERS[args.subcommand](config, out_dir, manifest)
    except (ConfigError, DomainError) as exc:
        manifest.finish("error", str(exc))
        manifest.write(out_dir)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        manifest.finish("numerical-failure", str(exc))
        manifest.write(out_dir)
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    manifest.finish("ok")
    manifest.write(out_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())

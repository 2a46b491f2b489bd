"""Deterministic batch outputs: CSV, plain PGM images, and run manifests.

CSV numbers are printed with 17 significant digits so reruns are
byte-comparable; PGM images are 8-bit, max-normalized, with the exact
normalization factor recorded in the manifest so values stay recoverable.
A manifest is written for every run, including failed ones.
"""

import json
import time
from pathlib import Path

import numpy as np

MANIFEST_SCHEMA = 1
MANIFEST_NAME = "manifest.json"


def fmt(value) -> str:
    """Fixed 17-significant-digit rendering of a float (nan allowed)."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if np.isnan(v):
        return "nan"
    return f"{v:.17g}"


def write_csv(path, header, rows) -> Path:
    """UTF-8, LF-terminated CSV with a header row; floats via fmt()."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(value if isinstance(value, str) else fmt(value)
                              for value in row) + "\n")
    return path


def write_pgm(path, values) -> float:
    """Plain (P2) 8-bit PGM, max-normalized; returns the normalization max.

    NaN cells render as 0.  Rows follow the first array axis.
    """
    path = Path(path)
    grid = np.asarray(values, dtype=float)
    finite = np.nan_to_num(grid, nan=0.0, posinf=0.0, neginf=0.0)
    finite = np.clip(finite, 0.0, None)
    peak = float(finite.max())
    scaled = (np.zeros_like(finite, dtype=int) if peak == 0.0
              else np.rint(finite / peak * 255).astype(int))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"P2\n{grid.shape[1]} {grid.shape[0]}\n255\n")
        for row in scaled:
            fh.write(" ".join(str(v) for v in row) + "\n")
    return peak


class Manifest:
    """Collects config echo, stage wall times and diagnostics for one run."""

    def __init__(self, command: str, config_echo: dict, version: str):
        self.data = {
            "schema_version": MANIFEST_SCHEMA,
            "library_version": version,
            "command": command,
            "config": config_echo,
            "stages": [],
            "diagnostics": {},
            "outputs": [],
            "status": "running",
            "error": None,
        }

    def stage(self, name: str):
        return _Stage(self, name)

    def diag(self, key: str, value):
        self.data["diagnostics"][key] = value

    def output(self, path):
        self.data["outputs"].append(str(path))

    def finish(self, status: str, error: str | None = None):
        self.data["status"] = status
        self.data["error"] = error

    def write(self, out_dir) -> Path:
        path = Path(out_dir) / MANIFEST_NAME
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.data, fh, indent=2, sort_keys=False)
            fh.write("\n")
        return path


class _Stage:
    def __init__(self, manifest: Manifest, name: str):
        self.manifest = manifest
        self.name = name

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.manifest.data["stages"].append(
            {"name": self.name,
             "seconds": round(time.perf_counter() - self.t0, 6)})
        return False

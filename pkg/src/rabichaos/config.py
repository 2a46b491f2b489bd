"""Run configuration: a line-oriented key = value format with strict keys.

Every run is described by a RunConfig whose defaults reproduce the reference
setup (omega=18, omega0=1, g=4, shell energy 14, Fock cutoff 150, time grid
0..500 step 0.5), so an empty document is a valid config.  Unknown keys are
errors, values are validated on load, and serialize_config round-trips
through parse_config, which keeps run manifests replayable.
"""

from dataclasses import dataclass, fields, replace

from .diagnostics import PhaseGrid
from .errors import ConfigError, DomainError
from .model import ModelParams, resolve_point
from .quantum import FockConfig


@dataclass(frozen=True)
class RunConfig:
    omega: float = 18.0
    omega0: float = 1.0
    g: float = 4.0
    energy: float = 14.0
    n_max: int = 150
    tail_tol: float = 1e-8
    t_end: float = 500.0
    dt: float = 0.5
    point: str | tuple = "C1"
    tol: float = 1e-10
    t_limit: float = 1e5
    crossings: int = 400
    seed_grid: int = 8
    poincare_single: bool = False  # one orbit from `point` instead of a seed lattice
    section_q1_min: float = -1.4
    section_q1_max: float = 1.4
    section_p1_min: float = -1.4
    section_p1_max: float = 1.4
    section_n_q1: int = 50
    section_n_p1: int = 50
    husimi_q_min: float = -10.0
    husimi_q_max: float = 10.0
    husimi_p_min: float = -10.0
    husimi_p_max: float = 10.0
    husimi_n_q: int = 201
    husimi_n_p: int = 201
    husimi_times: tuple = (0.0, 25.0, 100.0, 500.0)
    photon_n_list: tuple = (60, 100, 140, 150, 200)
    photon_t_end: float = 100.0
    photon_dt: float = 0.5
    workers: int = 0  # 0 = auto
    pgm: bool = False

    def params(self) -> ModelParams:
        return ModelParams(omega=self.omega, omega0=self.omega0, g=self.g)

    def fock(self) -> FockConfig:
        return FockConfig(n_max=self.n_max)

    def resolved_point(self):
        return resolve_point(self.point)

    def husimi_grid(self) -> PhaseGrid:
        return PhaseGrid(q_min=self.husimi_q_min, q_max=self.husimi_q_max,
                         n_q=self.husimi_n_q, p_min=self.husimi_p_min,
                         p_max=self.husimi_p_max, n_p=self.husimi_n_p)

    def validate(self) -> "RunConfig":
        """Raise ConfigError on any invalid combination; returns self."""
        try:
            self.params()
            self.fock()
            self.resolved_point()
            self.husimi_grid()
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
        checks = [
            (self.t_end > 0, "time.t_end must be positive"),
            (self.dt > 0, "time.dt must be positive"),
            (self.photon_t_end > 0, "photon.t_end must be positive"),
            (self.photon_dt > 0, "photon.dt must be positive"),
            (self.tol > 0, "integrator.tol must be positive"),
            (self.t_limit > 0, "integrator.t_limit must be positive"),
            (self.crossings >= 1, "poincare.crossings must be at least 1"),
            (self.seed_grid >= 1, "poincare.seed_grid must be at least 1"),
            (self.section_n_q1 >= 1 and self.section_n_p1 >= 1,
             "section resolution must be positive"),
            (self.section_q1_max > self.section_q1_min
             and self.section_p1_max > self.section_p1_min,
             "section ranges must be increasing"),
            (self.workers >= 0, "workers must be nonnegative"),
            (self.tail_tol > 0, "fock.tail_tol must be positive"),
            (all(t >= 0 for t in self.husimi_times),
             "husimi.times must be nonnegative"),
            (len(self.photon_n_list) >= 1, "photon.n_list must be nonempty"),
            (all(int(n) >= 1 for n in self.photon_n_list),
             "photon.n_list entries must be at least 1"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        return self


# key in the config document -> (dataclass field, parser)
def _parse_point(text: str):
    text = text.strip()
    if "," in text:
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError("point needs 4 coordinates q1,p1,q2,p2")
        return tuple(float(p) for p in parts)
    return _unquote(text)


def _unquote(text: str) -> str:
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    return text


def _parse_bool(text: str) -> bool:
    low = _unquote(text).lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _float_list(text: str) -> tuple:
    return tuple(float(p) for p in text.split(","))


def _int_list(text: str) -> tuple:
    return tuple(int(p) for p in text.split(","))


KEYS = {
    "omega": ("omega", float),
    "omega0": ("omega0", float),
    "g": ("g", float),
    "energy": ("energy", float),
    "fock.n_max": ("n_max", int),
    "fock.tail_tol": ("tail_tol", float),
    "time.t_end": ("t_end", float),
    "time.dt": ("dt", float),
    "point": ("point", _parse_point),
    "integrator.tol": ("tol", float),
    "integrator.t_limit": ("t_limit", float),
    "poincare.crossings": ("crossings", int),
    "poincare.seed_grid": ("seed_grid", int),
    "poincare.single_orbit": ("poincare_single", _parse_bool),
    "section.q1_min": ("section_q1_min", float),
    "section.q1_max": ("section_q1_max", float),
    "section.p1_min": ("section_p1_min", float),
    "section.p1_max": ("section_p1_max", float),
    "section.n_q1": ("section_n_q1", int),
    "section.n_p1": ("section_n_p1", int),
    "husimi.q_min": ("husimi_q_min", float),
    "husimi.q_max": ("husimi_q_max", float),
    "husimi.p_min": ("husimi_p_min", float),
    "husimi.p_max": ("husimi_p_max", float),
    "husimi.n_q": ("husimi_n_q", int),
    "husimi.n_p": ("husimi_n_p", int),
    "husimi.times": ("husimi_times", _float_list),
    "photon.n_list": ("photon_n_list", _int_list),
    "photon.t_end": ("photon_t_end", float),
    "photon.dt": ("photon_dt", float),
    "workers": ("workers", int),
    "output.pgm": ("pgm", _parse_bool),
}

_FIELD_TO_KEY = {field: key for key, (field, _) in KEYS.items()}


def parse_config(text: str) -> RunConfig:
    """Parse a config document; omitted keys fall back to the defaults."""
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw!r}",
                              line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", line=lineno)
        field, parser = KEYS[key]
        if field in overrides:
            raise ConfigError(f"duplicate key {key!r}", line=lineno)
        try:
            overrides[field] = parser(value.strip())
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}",
                              line=lineno) from exc
    return replace(RunConfig(), **overrides).validate()


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return f'"{value}"'
    if isinstance(value, tuple):
        return ", ".join(repr(v) if isinstance(v, float) else str(v)
                         for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(config: RunConfig) -> str:
    """Config document that parses back to exactly this config."""
    lines = []
    for field in fields(RunConfig):
        lines.append(f"{_FIELD_TO_KEY[field.name]} = "
                     f"{_format_value(getattr(config, field.name))}")
    return "\n".join(lines) + "\n"


def config_as_dict(config: RunConfig) -> dict:
    """JSON-friendly echo of the config (for manifests)."""
    out = {}
    for field in fields(RunConfig):
        value = getattr(config, field.name)
        out[_FIELD_TO_KEY[field.name]] = (list(value)
                                          if isinstance(value, tuple)
                                          else value)
    return out

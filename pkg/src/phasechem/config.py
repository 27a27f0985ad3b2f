"""Run configuration: parsing, validation, canonical serialization.

The configuration is a small TOML document with explicit blocks::

    [grid]    nx, ny, lx, ly, bc_mode
    [params]  rho1, rho2, nu1, nu2, m_star, m_star_upper,
              theta, theta0, chi, eps_int, eps_reg
    [time]    dt, t_end, output_every, max_steps
    [ic]      phi, phi_amplitude, phi_mean, phi_smooth, tanh_width,
              sigma, sigma_background, sigma_amplitude, sigma_width,
              velocity, velocity_amplitude, seed
    [output]  directory, write_fields, fields_every

Every key is optional; omitted keys take the defaults below.  Parsing either
returns a fully validated RunConfig or raises ConfigError carrying the whole
list of problems.  serialize() emits a canonical form, so
parse(serialize(parse(text))) is idempotent and the configuration hash is
well defined.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .coeffs import ModelParams, validate_hypotheses
from .errors import ConfigError
from .grid import BcMode, Grid

PHI_GENERATORS = ("spinodal", "tanh_strip", "zero")
SIGMA_GENERATORS = ("gaussian_bump", "uniform", "zero")
VELOCITY_GENERATORS = ("taylor_green", "zero")

TAU = 6.283185307179586


@dataclass
class GridConfig:
    nx: int = 64
    ny: int = 64
    lx: float = TAU
    ly: float = TAU
    bc_mode: str = "neumann_noslip"

    def build(self) -> Grid:
        return Grid(self.nx, self.ny, self.lx, self.ly, BcMode(self.bc_mode))


@dataclass
class TimeConfig:
    dt: float = 1e-4
    t_end: float = 0.2
    output_every: int = 1
    max_steps: int = 0          # 0 means unlimited


@dataclass
class IcConfig:
    phi: str = "spinodal"
    phi_amplitude: float = 0.05
    phi_mean: float = 0.0
    phi_smooth: float = -1.0    # noise filter width; negative means lx/16
    tanh_width: float = 0.2
    sigma: str = "gaussian_bump"
    sigma_background: float = 0.05
    sigma_amplitude: float = 0.8
    sigma_width: float = 0.6
    velocity: str = "zero"
    velocity_amplitude: float = 0.5
    seed: int = 12345


@dataclass
class OutputConfig:
    directory: str = "out"
    write_fields: bool = False
    fields_every: int = 0       # 0 means final snapshot only


@dataclass
class RunConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    params: ModelParams = field(default_factory=ModelParams)
    time: TimeConfig = field(default_factory=TimeConfig)
    ic: IcConfig = field(default_factory=IcConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


_SECTIONS = {
    "grid": GridConfig,
    "params": ModelParams,
    "time": TimeConfig,
    "ic": IcConfig,
    "output": OutputConfig,
}


def _coerce(name: str, value, target_type, errors: list):
    if target_type is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            errors.append(f"{name}: expected a number, got {value!r}")
            return 0.0
        return float(value)
    if target_type is int:
        if isinstance(value, bool) or not isinstance(value, int):
            errors.append(f"{name}: expected an integer, got {value!r}")
            return 0
        return int(value)
    if target_type is bool:
        if not isinstance(value, bool):
            errors.append(f"{name}: expected true/false, got {value!r}")
            return False
        return value
    if target_type is str:
        if not isinstance(value, str):
            errors.append(f"{name}: expected a string, got {value!r}")
            return ""
        return value
    raise TypeError(f"unhandled config field type {target_type}")


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"syntax error: {exc}"]) from exc

    errors: list[str] = []
    built = {}
    for section, cls in _SECTIONS.items():
        data = raw.pop(section, {})
        if not isinstance(data, dict):
            errors.append(f"[{section}] must be a table")
            data = {}
        kwargs = {}
        types = {f.name: type(getattr(cls(), f.name)) for f in fields(cls)}
        for key, value in data.items():
            if key not in types:
                errors.append(f"[{section}] unknown key '{key}'")
                continue
            kwargs[key] = _coerce(f"[{section}] {key}", value, types[key], errors)
        built[section] = cls(**kwargs)
    for stray in raw:
        errors.append(f"unknown section [{stray}]")
    if errors:
        raise ConfigError(errors)

    cfg = RunConfig(grid=built["grid"], params=built["params"],
                    time=built["time"], ic=built["ic"], output=built["output"])
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig):
    errors = []
    g = cfg.grid
    if g.nx < 4 or g.ny < 4:
        errors.append(f"[grid] nx, ny must be >= 4, got {g.nx}x{g.ny}")
    if not (g.lx > 0 and g.ly > 0):
        errors.append(f"[grid] lx, ly must be > 0, got {g.lx}, {g.ly}")
    if g.bc_mode not in ("neumann_noslip", "periodic"):
        errors.append(f"[grid] bc_mode must be neumann_noslip or periodic, "
                      f"got '{g.bc_mode}'")

    t = cfg.time
    if not t.dt > 0:
        errors.append(f"[time] dt must be > 0, got {t.dt}")
    if not t.t_end > 0:
        errors.append(f"[time] t_end must be > 0, got {t.t_end}")
    if t.output_every < 1:
        errors.append(f"[time] output_every must be >= 1, got {t.output_every}")
    if t.max_steps < 0:
        errors.append(f"[time] max_steps must be >= 0, got {t.max_steps}")

    ic = cfg.ic
    if ic.phi not in PHI_GENERATORS:
        errors.append(f"[ic] phi generator must be one of {PHI_GENERATORS}, "
                      f"got '{ic.phi}'")
    if ic.sigma not in SIGMA_GENERATORS:
        errors.append(f"[ic] sigma generator must be one of {SIGMA_GENERATORS}, "
                      f"got '{ic.sigma}'")
    if ic.velocity not in VELOCITY_GENERATORS:
        errors.append(f"[ic] velocity generator must be one of "
                      f"{VELOCITY_GENERATORS}, got '{ic.velocity}'")
    if ic.velocity == "taylor_green" and g.bc_mode != "periodic":
        errors.append("[ic] the taylor_green generator requires periodic "
                      "boundary conditions")
    if not abs(ic.phi_mean) < 1:
        errors.append(f"[ic] |phi_mean| must be < 1, got {ic.phi_mean}")
    if ic.sigma_background < 0 or ic.sigma_amplitude < 0:
        errors.append("[ic] sigma generator parameters must be nonnegative "
                      "(concentrations cannot start negative)")
    if ic.phi == "spinodal" and not (0 <= ic.phi_amplitude < 1):
        errors.append(f"[ic] phi_amplitude must lie in [0, 1), got "
                      f"{ic.phi_amplitude}")

    report = validate_hypotheses(cfg.params, phi_mean=cfg.ic.phi_mean)
    errors.extend(f"[params] {v}" for v in report.violations)
    if errors:
        raise ConfigError(errors)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, int):
        return str(value)
    return '"' + str(value) + '"'


def serialize_config(cfg: RunConfig) -> str:
    """Canonical TOML form: fixed section and key order, full precision."""
    out = []
    sections = [("grid", cfg.grid), ("params", cfg.params), ("time", cfg.time),
                ("ic", cfg.ic), ("output", cfg.output)]
    for name, obj in sections:
        out.append(f"[{name}]")
        for f in fields(obj):
            out.append(f"{f.name} = {_fmt(getattr(obj, f.name))}")
        out.append("")
    return "\n".join(out)


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode()).hexdigest()[:16]


def load_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError([f"cannot read config {path}: {exc}"]) from exc
    return parse_config(text)

"""Scenario configuration: flat ``key = value`` text with dotted sections.

Unknown keys are errors (typo safety for numerical experiments), duplicates
too.  ``load_config`` returns a fully validated :class:`ScenarioConfig` with
every default applied; ``echo_config`` renders it back as canonical text.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .core import ModelParams
from .coupling import CouplingConfig
from .errors import ConfigError
from .fluid import FluidSchemeConfig
from .kinetic import KineticSchemeConfig

INITIAL_KINDS = ("equilibrium", "fluid_perturbation", "kinetic_shift",
                 "two_stream", "custom_tabulated")


@dataclass(frozen=True)
class GridSpec:
    nx: int = 64
    nv: int = 64
    v_max: float | None = None   # None: resolved to 8 + |u_c| at build time


@dataclass(frozen=True)
class InitialSpec:
    """Deterministic initial-data recipe.

    ``amplitude``/``mode`` shape the density perturbation, ``delta_u`` shifts
    the particle Maxwellian relative to the common asymptotic speed,
    ``separation`` sets the two-stream beam distance.  ``random_phase`` draws
    the perturbation phase from the seeded generator instead of zero.
    """

    kind: str = "equilibrium"
    rho_mean: float = 1.0
    n_mean: float = 1.0
    u_fluid: float = 0.0
    amplitude: float = 0.0
    mode: int = 1
    delta_u: float = 0.0
    separation: float = 1.0
    path: str | None = None
    random_phase: bool = False


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    t_end: float
    sample_every: float
    snapshot_every: float | None = None
    dt_mode: str = "auto"
    dt: float | None = None
    safety: float = 0.9
    seed: int = 0
    grid: GridSpec = field(default_factory=GridSpec)
    params: ModelParams = field(default_factory=ModelParams)
    fluid: FluidSchemeConfig = field(default_factory=FluidSchemeConfig)
    kinetic: KineticSchemeConfig = field(default_factory=KineticSchemeConfig)
    coupling: CouplingConfig = field(default_factory=CouplingConfig)
    initial: InitialSpec = field(default_factory=InitialSpec)


def nominal_u_c(spec: InitialSpec) -> float:
    """Closed-form common speed for the built-in initial-data families.

    The particle mean sits at ``u_c + delta_u`` while the fluid starts at
    ``u_fluid``; solving the mixture-momentum identity for ``u_c`` gives
    ``u_fluid + (n_mean / rho_mean) * delta_u``."""
    if spec.kind in ("equilibrium", "two_stream"):
        return spec.u_fluid
    if spec.kind in ("fluid_perturbation", "kinetic_shift"):
        return spec.u_fluid + (spec.n_mean / spec.rho_mean) * spec.delta_u
    raise ConfigError(f"no closed-form bulk speed for kind {spec.kind!r}")


def _parse_bool(raw: str, key: str, line: int) -> bool:
    low = raw.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}", line, key)


def _parse_int(raw: str, key: str, line: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}", line, key) from None


def _parse_float(raw: str, key: str, line: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}", line, key) from None


def _parse_str(raw: str, key: str, line: int) -> str:
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "'\"":
        return raw[1:-1]
    return raw


_SCHEMA = {
    "name": _parse_str,
    "t_end": _parse_float,
    "sample_every": _parse_float,
    "snapshot_every": _parse_float,
    "dt_mode": _parse_str,
    "dt": _parse_float,
    "safety": _parse_float,
    "seed": _parse_int,
    "grid.nx": _parse_int,
    "grid.nv": _parse_int,
    "grid.v_max": _parse_float,
    "params.A": _parse_float,
    "params.gamma": _parse_float,
    "params.mu0": _parse_float,
    "params.mu1": _parse_float,
    "params.beta": _parse_float,
    "params.kappa0": _parse_float,
    "fluid.cfl": _parse_float,
    "fluid.visc_theta": _parse_int,
    "fluid.reconstruction": _parse_str,
    "kinetic.transport": _parse_str,
    "kinetic.fp_solver": _parse_str,
    "kinetic.positivity_clip": _parse_bool,
    "coupling.splitting": _parse_str,
    "coupling.picard": _parse_bool,
    "initial.kind": _parse_str,
    "initial.rho_mean": _parse_float,
    "initial.n_mean": _parse_float,
    "initial.u_fluid": _parse_float,
    "initial.amplitude": _parse_float,
    "initial.mode": _parse_int,
    "initial.delta_u": _parse_float,
    "initial.separation": _parse_float,
    "initial.path": _parse_str,
    "initial.random_phase": _parse_bool,
}


def _parse_text(text: str) -> dict:
    values: dict[str, object] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw_line.strip()!r}", lineno)
        key, raw_value = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r}", lineno, key)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno, key)
        if not raw_value:
            raise ConfigError(f"{key}: missing value", lineno, key)
        values[key] = _SCHEMA[key](raw_value, key, lineno)
    return values


def _build(values: dict) -> ScenarioConfig:
    def group(prefix, cls, **extra):
        kwargs = {k.split(".", 1)[1]: v for k, v in values.items()
                  if k.startswith(prefix + ".")}
        kwargs.update(extra)
        try:
            return cls(**kwargs)
        except ValueError as err:
            raise ConfigError(str(err), field=prefix) from None

    if "name" not in values:
        raise ConfigError("missing required key 'name'")
    if "t_end" not in values:
        raise ConfigError("missing required key 't_end'")
    t_end = values["t_end"]
    cfg = ScenarioConfig(
        name=values["name"],
        t_end=t_end,
        sample_every=values.get("sample_every", t_end / 20.0),
        snapshot_every=values.get("snapshot_every"),
        dt_mode=values.get("dt_mode", "auto"),
        dt=values.get("dt"),
        safety=values.get("safety", 0.9),
        seed=values.get("seed", 0),
        grid=group("grid", GridSpec),
        params=group("params", ModelParams),
        fluid=group("fluid", FluidSchemeConfig),
        kinetic=group("kinetic", KineticSchemeConfig),
        coupling=group("coupling", CouplingConfig),
        initial=group("initial", InitialSpec),
    )
    return cfg


def validate_config(cfg: ScenarioConfig) -> ScenarioConfig:
    """Check every cross-field invariant; returns the config unchanged."""
    if not cfg.t_end > 0:
        raise ConfigError(f"t_end must be positive, got {cfg.t_end}", field="t_end")
    if not 0 < cfg.sample_every <= cfg.t_end:
        raise ConfigError(
            f"sample_every must lie in (0, t_end], got {cfg.sample_every}",
            field="sample_every")
    if cfg.snapshot_every is not None and not cfg.snapshot_every > 0:
        raise ConfigError("snapshot_every must be positive", field="snapshot_every")
    if cfg.dt_mode not in ("auto", "fixed"):
        raise ConfigError(f"dt_mode must be 'auto' or 'fixed', got {cfg.dt_mode!r}",
                          field="dt_mode")
    if cfg.dt_mode == "fixed":
        if cfg.dt is None or not cfg.dt > 0:
            raise ConfigError("dt_mode = fixed requires a positive dt", field="dt")
    if not 0 < cfg.safety <= 1:
        raise ConfigError(f"safety must lie in (0, 1], got {cfg.safety}", field="safety")
    if cfg.seed < 0:
        raise ConfigError("seed must be nonnegative", field="seed")
    if cfg.grid.nx < 4:
        raise ConfigError(f"grid.nx must be >= 4, got {cfg.grid.nx}", field="grid.nx")
    if cfg.grid.nv < 8:
        raise ConfigError(f"grid.nv must be >= 8, got {cfg.grid.nv}", field="grid.nv")
    if cfg.grid.v_max is not None and not cfg.grid.v_max > 0:
        raise ConfigError("grid.v_max must be positive", field="grid.v_max")
    ini = cfg.initial
    if ini.kind not in INITIAL_KINDS:
        raise ConfigError(f"unknown initial.kind {ini.kind!r}", field="initial.kind")
    if not ini.rho_mean > 0:
        raise ConfigError("initial.rho_mean must be positive", field="initial.rho_mean")
    if ini.n_mean < 0:
        raise ConfigError("initial.n_mean must be nonnegative", field="initial.n_mean")
    if ini.amplitude < 0:
        raise ConfigError("initial.amplitude must be nonnegative",
                          field="initial.amplitude")
    if ini.kind == "fluid_perturbation" and ini.amplitude >= 1:
        raise ConfigError(
            "initial.amplitude must be < 1: the perturbed density has to stay "
            "strictly positive", field="initial.amplitude")
    if ini.mode < 1:
        raise ConfigError("initial.mode must be >= 1", field="initial.mode")
    if ini.kind == "two_stream" and not ini.separation > 0:
        raise ConfigError("initial.separation must be positive",
                          field="initial.separation")
    if ini.kind == "custom_tabulated":
        if ini.path is None:
            raise ConfigError("initial.kind = custom_tabulated requires initial.path",
                              field="initial.path")
        if cfg.grid.v_max is None:
            raise ConfigError("custom_tabulated initial data requires an explicit "
                              "grid.v_max", field="grid.v_max")
    return cfg


def load_config(text: str) -> ScenarioConfig:
    """Parse and validate config text; all defaults applied."""
    return validate_config(_build(_parse_text(text)))


def config_as_dict(cfg: ScenarioConfig) -> dict:
    """Flat dotted-key dict of every resolved value (the manifest echo)."""
    out = {
        "name": cfg.name, "t_end": cfg.t_end, "sample_every": cfg.sample_every,
        "snapshot_every": cfg.snapshot_every, "dt_mode": cfg.dt_mode, "dt": cfg.dt,
        "safety": cfg.safety, "seed": cfg.seed,
    }
    for prefix, obj in (("grid", cfg.grid), ("params", cfg.params),
                        ("fluid", cfg.fluid), ("kinetic", cfg.kinetic),
                        ("coupling", cfg.coupling), ("initial", cfg.initial)):
        for name, value in vars(obj).items():
            out[f"{prefix}.{name}"] = value
    return out


def echo_config(cfg: ScenarioConfig) -> str:
    """Canonical config text with every default filled in."""
    lines = []
    for key, value in config_as_dict(cfg).items():
        if value is None:
            continue
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def with_refined_grid(cfg: ScenarioConfig, factor: int) -> ScenarioConfig:
    """Same scenario on an x-grid refined by ``factor`` (dt scaled along)."""
    new_grid = replace(cfg.grid, nx=cfg.grid.nx * factor)
    dt = cfg.dt / factor if cfg.dt is not None else None
    return replace(cfg, grid=new_grid, dt=dt)

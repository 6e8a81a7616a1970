"""Run configuration, frozen figure presets and INI parsing.

All values are dimensionless, in units of the cavity frequency. The only
physical quantity is ``omega0_hz`` in the ``[physical]`` section, used to
report the output flux in photons per second.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields, replace

from .model import ModelParams, PulseParams

N_FOCK_RANGE = (4, 64)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    name: str = "custom"
    omega_r: tuple[float, ...] = (0.6,)
    omega_gs: float = 3.5
    detuning: float = 0.0
    gamma0: float = 0.02
    gamma_eg: float = 0.02
    gamma_gs: tuple[float, ...] = (0.02,)
    n_fock: int = 16
    n_atoms: int = 1
    initial: str = "dressed_ground"
    dt: float = 2e-3
    t_end: float = 400.0
    sigma_pulse: tuple[float, ...] = ()
    amplitude_scale: float = 1.0
    pulse_start_sigmas: float = 6.0
    omega_r_min: float = 0.0
    omega_r_max: float = 1.0
    omega_r_step: float = 0.02
    n_levels: int = 8
    spectrum_t_end: float = 600.0
    spectrum_n_t: int = 3001
    omega_min: float = 0.0
    omega_max: float = 5.5
    n_omega: int = 2001
    csv_stride: int = 50
    omega0_hz: float | None = None

    def __post_init__(self):
        for name in ("gamma0", "gamma_eg"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if any(g < 0 for g in self.gamma_gs):
            raise ConfigError("gamma_gs must be >= 0")
        if any(w < 0 for w in self.omega_r):
            raise ConfigError("omega_r must be >= 0")
        lo, hi = N_FOCK_RANGE
        if not lo <= self.n_fock <= hi:
            raise ConfigError(f"n_fock={self.n_fock} outside supported range [{lo}, {hi}]")
        if self.n_atoms not in (1, 2):
            raise ConfigError("n_atoms must be 1 or 2")
        if self.initial not in ("dressed_ground", "pulse"):
            raise ConfigError(f"unknown initial-state kind {self.initial!r}")
        if self.initial == "pulse" and not self.sigma_pulse:
            raise ConfigError("pulse initialization needs sigma_pulse")
        if self.dt <= 0 or self.t_end <= 0:
            raise ConfigError("dt and t_end must be positive")
        if self.csv_stride < 1:
            raise ConfigError("csv_stride must be >= 1")
        if self.omega0_hz is not None and self.omega0_hz <= 0:
            raise ConfigError("omega0_hz must be positive")

    def model(self, omega_r: float) -> ModelParams:
        p = ModelParams.zero_detuning(omega_r, omega_gs=self.omega_gs)
        if self.detuning:
            p = replace(p, omega_e=p.omega_e + self.detuning)
        return p

    def rates(self, gamma_gs: float) -> dict:
        return {"cavity": self.gamma0, "eg": self.gamma_eg, "gs": gamma_gs}

    def pulse(self, sigma: float) -> PulseParams:
        return PulseParams(sigma=sigma, amplitude_scale=self.amplitude_scale)


_FIG3A = dict(omega_r=(0.3, 0.4, 0.6), gamma0=0.02, gamma_eg=0.02, gamma_gs=(0.02,),
              n_fock=16, dt=2e-3, t_end=400.0)

PRESETS: dict[str, RunConfig] = {
    "fig2": RunConfig(name="fig2", omega_r=(0.0,), n_fock=16,
                      omega_r_min=0.0, omega_r_max=1.0, omega_r_step=0.02, n_levels=8),
    "fig3a": RunConfig(name="fig3a", **_FIG3A),
    "fig3b": RunConfig(name="fig3b", omega_r=(0.6,), gamma0=0.0, gamma_eg=0.02,
                       gamma_gs=(0.01, 0.015, 0.03, 0.04), n_fock=16, dt=2e-3, t_end=400.0),
    "fig3c": RunConfig(name="fig3c", omega_r=(0.65,), gamma0=0.01, gamma_eg=0.02,
                       gamma_gs=(0.02,), n_fock=12, n_atoms=2, dt=2e-3, t_end=400.0),
    "fig3d": RunConfig(name="fig3d", omega_r=(0.6,), gamma0=0.02, gamma_eg=0.02,
                       gamma_gs=(0.02,), n_fock=16, dt=2e-3, t_end=400.0,
                       initial="pulse", sigma_pulse=(5.0, 1.7)),
    "fig4a": RunConfig(name="fig4a", omega_r=(0.0, 0.6), gamma0=0.02, gamma_eg=0.02,
                       gamma_gs=(0.02,), n_fock=16, dt=2e-3, spectrum_t_end=600.0,
                       spectrum_n_t=3001, omega_min=0.0, omega_max=5.5, n_omega=2001),
    "fig4bcd": RunConfig(name="fig4bcd", omega_r=(0.6,), gamma0=0.02, gamma_eg=0.02,
                         gamma_gs=(0.02,), n_fock=16, dt=2e-3, t_end=400.0),
}

# INI section -> keys accepted there
SECTIONS = {
    "run": {"name", "initial"},
    "model": {"omega_r", "omega_gs", "detuning"},
    "rates": {"gamma0", "gamma_eg", "gamma_gs"},
    "space": {"n_fock", "n_atoms"},
    "time": {"dt", "t_end", "csv_stride"},
    "pulse": {"sigma_pulse", "amplitude_scale", "pulse_start_sigmas"},
    "levels": {"omega_r_min", "omega_r_max", "omega_r_step", "n_levels"},
    "spectrum": {"spectrum_t_end", "spectrum_n_t", "omega_min", "omega_max", "n_omega"},
    "physical": {"omega0_hz"},
}

_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw):
    if key not in _TYPES:
        raise ConfigError(f"unknown configuration key {key!r}")
    kind = str(_TYPES[key])
    if isinstance(raw, str):
        raw = raw.strip()
    try:
        if kind.startswith("tuple"):
            if isinstance(raw, (tuple, list)):
                return tuple(float(x) for x in raw)
            if isinstance(raw, (int, float)):
                return (float(raw),)
            return tuple(float(x) for x in raw.split(",") if x.strip())
        if kind == "int":
            return int(raw)
        if kind == "str":
            return str(raw)
        if raw is None or raw == "":
            return None
        return float(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc


def apply_overrides(cfg: RunConfig, overrides: dict) -> RunConfig:
    """Return ``cfg`` with ``overrides`` applied; unknown keys raise :class:`ConfigError`."""
    clean = {k: _coerce(k, v) for k, v in overrides.items() if v is not None}
    return replace(cfg, **clean)


def load_ini(path, base: RunConfig | None = None) -> RunConfig:
    """Read an INI file on top of ``base`` (default :class:`RunConfig`)."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    overrides = {}
    preset = None
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown configuration section [{section}]")
        for key, value in parser.items(section):
            if section == "run" and key == "preset":
                preset = value.strip()
                continue
            if key not in SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            overrides[key] = value
    if preset is not None:
        base = get_preset(preset)
    return apply_overrides(base or RunConfig(), overrides)


def get_preset(name: str) -> RunConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None

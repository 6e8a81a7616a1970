"""Figure-level runs shared by the command line and the acceptance suite."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .config import RunConfig
from .correlations import SpectrumResult, emission_spectrum
from .dressed import level_sweep
from .dynamics import Trajectory
from .hilbert import HilbertSpace
from .model import PulseParams
from .observables import statistics_from_moments
from .system import System

log = logging.getLogger(__name__)

NFOCK_REL_TOL = 1e-4
DT_ABS_TOL = 1e-6


@dataclass
class Run:
    label: str
    omega_r: float
    gamma_gs: float
    sigma: float | None
    system: System
    trajectory: Trajectory
    t0_index: int = 0

    @property
    def times(self) -> np.ndarray:
        return self.trajectory.times

    @property
    def n_phys(self) -> np.ndarray:
        return self.trajectory["n_phys"]

    def peak(self) -> tuple[float, float]:
        i = int(np.argmax(self.n_phys))
        return float(self.n_phys[i]), float(self.times[i])


def build_system(cfg: RunConfig, omega_r: float, gamma_gs: float, n_fock: int | None = None) -> System:
    return System(cfg.model(omega_r), cfg.rates(gamma_gs), n_fock or cfg.n_fock, cfg.n_atoms)


def coupling_grid(cfg: RunConfig) -> np.ndarray:
    n = int(round((cfg.omega_r_max - cfg.omega_r_min) / cfg.omega_r_step))
    return np.round(cfg.omega_r_min + cfg.omega_r_step * np.arange(n + 1), 12)


def levels(cfg: RunConfig) -> dict:
    space = HilbertSpace(cfg.n_fock, cfg.n_atoms)
    return level_sweep(coupling_grid(cfg), cfg.model(0.0), space, cfg.n_levels)


def trajectories(cfg: RunConfig, with_reference: bool = True) -> list[Run]:
    """Every (coupling, gamma_gs[, pulse width]) run of a config.

    Pulse configs also include the dressed-ground reference run when
    ``with_reference`` is set.
    """
    runs = []
    for w in cfg.omega_r:
        for ggs in cfg.gamma_gs:
            system = build_system(cfg, w, ggs)
            if cfg.initial == "pulse":
                if with_reference:
                    tr = system.evolve(cfg.t_end, cfg.dt)
                    runs.append(Run(f"wr{w:g}_ggs{ggs:g}_reference", w, ggs, None, system, tr))
                for sigma in cfg.sigma_pulse:
                    t_start = -cfg.pulse_start_sigmas * sigma
                    t_start = cfg.dt * np.floor(t_start / cfg.dt)
                    tr = system.evolve_driven(cfg.pulse(sigma), t_start, cfg.t_end, cfg.dt)
                    i0 = int(np.argmin(np.abs(tr.times)))
                    runs.append(Run(f"wr{w:g}_ggs{ggs:g}_sigma{sigma:g}", w, ggs, sigma,
                                    system, tr, i0))
            else:
                log.info("evolving omega_r=%g gamma_gs=%g", w, ggs)
                tr = system.evolve(cfg.t_end, cfg.dt)
                runs.append(Run(f"wr{w:g}_ggs{ggs:g}", w, ggs, None, system, tr))
    return runs


def statistics(run: Run) -> dict:
    return statistics_from_moments(run.trajectory.observables)


def spectra(cfg: RunConfig) -> list[tuple[float, System, SpectrumResult]]:
    omega = np.linspace(cfg.omega_min, cfg.omega_max, cfg.n_omega)
    out = []
    for w in cfg.omega_r:
        system = build_system(cfg, w, cfg.gamma_gs[0])
        res = emission_spectrum(system.initial_state(), system.dissipators, system.obs.sigma_plus,
                                cfg.spectrum_t_end, cfg.spectrum_n_t, omega, dt=cfg.dt)
        out.append((w, system, res))
    return out


@dataclass
class ConvergenceReport:
    omega_r: float
    peak: float
    peak_fock: float
    peak_half_dt: float
    series_half_dt: float
    n_fock: int
    dt: float
    rows: list = field(default_factory=list)

    @property
    def fock_rel(self) -> float:
        return abs(self.peak_fock - self.peak) / self.peak

    @property
    def dt_abs(self) -> float:
        return abs(self.peak_half_dt - self.peak)

    @property
    def passed(self) -> bool:
        return (self.fock_rel < NFOCK_REL_TOL and self.dt_abs < DT_ABS_TOL
                and self.series_half_dt < DT_ABS_TOL)


def convergence(cfg: RunConfig, omega_r: float | None = None) -> ConvergenceReport:
    """Peak photon number under Fock-cutoff doubling and step halving.

    Uses the strongest coupling of the config unless ``omega_r`` is given.
    """
    w = max(cfg.omega_r) if omega_r is None else omega_r
    ggs = cfg.gamma_gs[0]
    base = build_system(cfg, w, ggs).evolve(cfg.t_end, cfg.dt)
    nf2 = min(2 * cfg.n_fock, 64)
    fock = build_system(cfg, w, ggs, n_fock=nf2).evolve(cfg.t_end, cfg.dt)
    half = build_system(cfg, w, ggs).evolve(cfg.t_end, cfg.dt / 2)
    n0 = base["n_phys"]
    n_half = half["n_phys"][::2]
    return ConvergenceReport(
        omega_r=w,
        peak=float(n0.max()),
        peak_fock=float(fock["n_phys"].max()),
        peak_half_dt=float(half["n_phys"].max()),
        series_half_dt=float(np.max(np.abs(n_half - n0))),
        n_fock=cfg.n_fock,
        dt=cfg.dt,
    )


def calibrate_pulse(system: System, sigma: float, scales, dt: float = 2e-3,
                    span_sigmas: float = 6.0) -> tuple[float, np.ndarray]:
    """Amplitude scale maximizing the dressed-vacuum population right after the pulse.

    Returns ``(best_scale, populations)`` with populations measured at
    ``t = span_sigmas * sigma``.
    """
    scales = np.asarray(list(scales), dtype=float)
    pops = np.empty(scales.size)
    t0 = dt * np.floor(-span_sigmas * sigma / dt)
    t1 = dt * np.ceil(span_sigmas * sigma / dt)
    for i, a in enumerate(scales):
        tr = system.evolve_driven(PulseParams(sigma=sigma, amplitude_scale=float(a)), t0, t1, dt)
        pops[i] = tr["P_dressed_ground"][-1]
    return float(scales[int(np.argmax(pops))]), pops


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    return replace(cfg, **kw)

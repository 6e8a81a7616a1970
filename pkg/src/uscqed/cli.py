"""Command-line front end: ``uscqed <subcommand> [--preset NAME] [--config FILE] ...``."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import experiments
from .config import ConfigError, PRESETS, RunConfig, apply_overrides, get_preset, load_ini
from .dissipation import transition_table
from .dynamics import InvariantError, StepSizeError
from .io import write_csv

EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_CONVERGENCE = 4

SUBCOMMANDS = ("levels", "evolve", "statistics", "spectrum", "converge", "audit-dissipators")

OVERRIDE_FLAGS = {
    "--omega-r": "omega_r",
    "--gamma0": "gamma0",
    "--gamma-gs": "gamma_gs",
    "--gamma-eg": "gamma_eg",
    "--n-fock": "n_fock",
    "--dt": "dt",
    "--t-end": "t_end",
    "--sigma-pulse": "sigma_pulse",
    "--n-atoms": "n_atoms",
    "--omega0-hz": "omega0_hz",
    "--csv-stride": "csv_stride",
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uscqed", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--preset", choices=sorted(PRESETS))
        s.add_argument("--config", type=Path, help="INI file applied after the preset")
        s.add_argument("--out-dir", type=Path, default=Path("out"))
        s.add_argument("--physical", action="store_true",
                       help="also report flux in photons/s (needs omega0_hz)")
        for flag, dest in OVERRIDE_FLAGS.items():
            s.add_argument(flag, dest=dest, default=None,
                           help="comma-separated list allowed" if dest in
                           ("omega_r", "gamma_gs", "sigma_pulse") else None)
    return p


def resolve_config(args) -> RunConfig:
    cfg = get_preset(args.preset) if args.preset else RunConfig()
    if args.config is not None:
        cfg = load_ini(args.config, base=cfg)
    overrides = {dest: getattr(args, dest) for dest in OVERRIDE_FLAGS.values()}
    cfg = apply_overrides(cfg, overrides)
    if args.physical and cfg.omega0_hz is None:
        raise ConfigError("--physical requires omega0_hz ([physical] section or --omega0-hz)")
    return cfg


def _meta(cfg: RunConfig, **extra) -> dict:
    d = {k: v for k, v in sorted(asdict(cfg).items())}
    d.update(extra)
    return d


def _photons_per_second(flux, cfg: RunConfig):
    # flux is in units of omega0; omega0 is an angular frequency 2 pi f
    return flux * 2.0 * math.pi * cfg.omega0_hz


def cmd_levels(cfg, out: Path):
    data = experiments.levels(cfg)
    m = cfg.n_levels
    cols = ["omega_r"] + [f"E_{i}" for i in range(m)] + [f"sector_{i}" for i in range(m)] + ["E_rwa_ground"]
    rows = []
    for i, w in enumerate(data["omega_r"]):
        rows.append([w, *data["energies"][i], *[str(s) for s in data["sectors"][i]], data["rwa_ground"][i]])
    path = write_csv(out / f"{cfg.name}_levels.csv", "levels", cols, rows, _meta(cfg))
    print(f"wrote {path}")


def cmd_evolve(cfg, out: Path):
    for run in experiments.trajectories(cfg):
        tr = run.trajectory
        idx = np.arange(0, tr.times.size, cfg.csv_stride)
        flux = run.system.obs.gamma0 * tr["n_phys"]
        cols = ["t", "n_phys", "flux", "P_dressed_ground", "P_s0"]
        series = [tr.times, tr["n_phys"], flux, tr["P_dressed_ground"], tr["P_s0"]]
        if cfg.omega0_hz is not None:
            cols.append("flux_per_s")
            series.append(_photons_per_second(flux, cfg))
        rows = zip(*(s[idx] for s in series))
        peak, tpeak = run.peak()
        meta = _meta(cfg, run=run.label, peak_n_phys=f"{peak:.12e}", peak_time=f"{tpeak:.6f}",
                     max_trace_error=f"{tr.max_trace_error:.3e}",
                     min_eigenvalue=f"{tr.min_eigenvalue:.3e}")
        path = write_csv(out / f"{cfg.name}_{run.label}_trajectory.csv", "trajectory", cols, rows, meta)
        line = f"{run.label}: peak <X-X+> = {peak:.6e} at t = {tpeak:.3f}"
        if cfg.omega0_hz is not None:
            line += f", peak flux = {_photons_per_second(run.system.obs.gamma0 * peak, cfg):.4e} photons/s"
        print(line)
        print(f"wrote {path}")


def cmd_statistics(cfg, out: Path):
    for run in experiments.trajectories(cfg, with_reference=False):
        st = experiments.statistics(run)
        idx = np.arange(0, run.times.size, cfg.csv_stride)
        cols = ["t", "n_phys", "g2", "G2", "g3"]
        rows = zip(*(s[idx] for s in (run.times, st["n_phys"], st["g2"], st["G2"], st["g3"])))
        path = write_csv(out / f"{cfg.name}_{run.label}_statistics.csv", "statistics", cols, rows,
                         _meta(cfg, run=run.label))
        print(f"wrote {path}")


def cmd_spectrum(cfg, out: Path):
    for w, _, res in experiments.spectra(cfg):
        meta = _meta(cfg, omega_r_run=w, **{f"spectrum_{k}": v for k, v in res.metadata.items()})
        p1 = write_csv(out / f"{cfg.name}_wr{w:g}_spectrum.csv", "spectrum", ["omega", "S_normalized"],
                       zip(res.frequencies, res.values), meta)
        p2 = write_csv(out / f"{cfg.name}_wr{w:g}_peaks.csv", "peaks", ["position", "height"],
                       [(pk.position, pk.height) for pk in res.peaks], meta)
        peaks = ", ".join(f"{pk.position:.4f} ({pk.height:.3g})" for pk in res.peaks)
        print(f"omega_r={w:g}: peaks at {peaks}")
        print(f"wrote {p1}\nwrote {p2}")


def cmd_converge(cfg, out: Path) -> int:
    rep = experiments.convergence(cfg)
    rows = [
        ("peak_n_phys_fock_doubling_rel", rep.peak, rep.peak_fock, rep.fock_rel,
         experiments.NFOCK_REL_TOL, int(rep.fock_rel < experiments.NFOCK_REL_TOL)),
        ("peak_n_phys_dt_halving_abs", rep.peak, rep.peak_half_dt, rep.dt_abs,
         experiments.DT_ABS_TOL, int(rep.dt_abs < experiments.DT_ABS_TOL)),
        ("series_n_phys_dt_halving_abs", rep.peak, rep.peak_half_dt, rep.series_half_dt,
         experiments.DT_ABS_TOL, int(rep.series_half_dt < experiments.DT_ABS_TOL)),
    ]
    path = write_csv(out / f"{cfg.name}_convergence.csv", "convergence",
                     ["quantity", "base", "variant", "delta", "threshold", "passed"], rows,
                     _meta(cfg, omega_r_run=rep.omega_r))
    for r in rows:
        print(f"{r[0]}: delta = {r[3]:.3e} (threshold {r[4]:g}) {'PASS' if r[5] else 'FAIL'}")
    print(f"wrote {path}")
    return 0 if rep.passed else EXIT_CONVERGENCE


def cmd_audit(cfg, out: Path):
    for w in cfg.omega_r:
        for ggs in cfg.gamma_gs:
            system = experiments.build_system(cfg, w, ggs)
            rows = transition_table(system.dissipators)
            path = write_csv(out / f"{cfg.name}_wr{w:g}_ggs{ggs:g}_dissipators.csv", "dissipators",
                             ["channel", "j", "k", "omega_kj", "rate"], rows, _meta(cfg))
            print(f"wrote {path} ({len(rows)} transitions)")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    handlers = {
        "levels": cmd_levels,
        "evolve": cmd_evolve,
        "statistics": cmd_statistics,
        "spectrum": cmd_spectrum,
        "converge": cmd_converge,
        "audit-dissipators": cmd_audit,
    }
    try:
        code = handlers[args.command](cfg, args.out_dir)
    except (InvariantError, StepSizeError) as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    return code or 0


if __name__ == "__main__":
    sys.exit(main())

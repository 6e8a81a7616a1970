"""Fixed-step RK4 propagation of the dressed-basis master equation.

Propagation happens in the dressed frame, where the undriven Hamiltonian is
diagonal and the generator is a sparse matrix on ``vec(rho)``. Trace and
positivity are monitored at regular checkpoints; breaches raise
:class:`InvariantError` rather than being clipped.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .dissipation import DissipatorSet, commutator_superoperator, liouvillian
from .dressed import DressedBasis
from .hilbert import Operator
from .model import PulseParams, build_pulse_operator, gaussian_envelope

log = logging.getLogger(__name__)

TRACE_TOL = 1e-7
POSITIVITY_TOL = 1e-7


class InvariantError(RuntimeError):
    """A density-matrix invariant was violated during propagation."""


class StepSizeError(ValueError):
    """Requested step exceeds the stability bound."""


@dataclass
class Trajectory:
    """Time grid, scalar observable series and thinned dressed-frame states."""

    basis: DressedBasis
    times: np.ndarray
    observables: dict[str, np.ndarray]
    state_times: np.ndarray
    states: list = field(default_factory=list)
    max_trace_error: float = 0.0
    min_eigenvalue: float = 1.0
    dt: float = 0.0

    def state(self, i: int) -> np.ndarray:
        """Bare-basis density matrix at ``state_times[i]``."""
        return self.basis.to_bare(self.states[i])

    @property
    def final_dressed(self) -> np.ndarray:
        return self.states[-1]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.observables[name]


def initial_state(kind: str, basis: DressedBasis, custom=None) -> np.ndarray:
    """Bare-basis density matrix of a pure initial state.

    ``kind`` is ``"dressed_ground"`` (lowest state with no atom in ``s``),
    ``"bare"`` (``|s, 0>``, or ``custom=(n, level, ...)``) or ``"custom"``
    (a ket or density matrix passed as ``custom``).
    """
    space = basis.space
    if kind == "dressed_ground":
        v = basis.vectors[:, basis.dressed_ground_index]
    elif kind == "bare":
        if custom is None:
            v = space.basis_vector(0, *("s",) * space.n_atoms)
        else:
            v = space.basis_vector(int(custom[0]), *custom[1:])
    elif kind == "custom":
        arr = np.asarray(custom.data if isinstance(custom, Operator) else custom, dtype=complex)
        if arr.ndim == 2:
            if arr.shape != (space.dim, space.dim):
                raise ValueError("custom density matrix has the wrong shape")
            return arr / np.trace(arr)
        v = arr / np.linalg.norm(arr)
    else:
        raise ValueError(f"unknown initial-state kind {kind!r}")
    return np.outer(v, v.conj())


def stability_bound(H: Operator, dset: DissipatorSet) -> float:
    """``0.5 / (||H||_2 + sum Gamma)``."""
    if H is dset.basis.hamiltonian:
        hnorm = float(np.max(np.abs(dset.basis.energies)))
    else:
        hnorm = float(np.linalg.norm(H.data, 2))
    return 0.5 / (hnorm + dset.total_rate())


def _n_steps(t0: float, t1: float, dt: float) -> int:
    if t1 <= t0:
        raise ValueError("t_end must exceed the start time")
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = int(round((t1 - t0) / dt))
    if abs(n * dt - (t1 - t0)) > 1e-9 * max(1.0, abs(t1 - t0)):
        raise ValueError(f"time span {t1 - t0} is not a multiple of dt={dt}")
    return n


class _Monitor:
    def __init__(self, n: int, raise_on_breach: bool):
        self.n = n
        self.raise_on_breach = raise_on_breach
        self.max_trace_error = 0.0
        self.min_eigenvalue = 1.0

    def check(self, y: np.ndarray, t: float):
        rho = y.reshape(self.n, self.n)
        tr = np.trace(rho)
        terr = abs(tr - 1.0)
        lam = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
        self.max_trace_error = max(self.max_trace_error, terr)
        self.min_eigenvalue = min(self.min_eigenvalue, lam)
        if self.raise_on_breach:
            if terr > TRACE_TOL:
                raise InvariantError(
                    f"trace invariant violated at t={t:.6g}: |Tr rho - 1| = {terr:.3e} > {TRACE_TOL:g}"
                    " (reduce dt or check the Fock cutoff)")
            if lam < -POSITIVITY_TOL:
                raise InvariantError(
                    f"positivity invariant violated at t={t:.6g}: min eigenvalue {lam:.3e} < -{POSITIVITY_TOL:g}"
                    " (reduce dt or check the Fock cutoff)")


def _obs_matrix(observables: dict | None, basis: DressedBasis):
    names = list(observables or {})
    if not names:
        return names, None
    rows = []
    for name in names:
        op = observables[name]
        od = basis.to_dressed(op)
        rows.append(od.T.ravel())
    return names, np.array(rows)


def _propagate(L0, y, times, dt, drive=None, obs=None, store_every=50, check_every=50,
               monitor=None):
    """RK4 loop. ``drive=(Lp, f, t_on, t_off)`` adds ``f(t) Lp`` while ``t_on <= t <= t_off``."""
    names, omat = obs if obs is not None else ([], None)
    n_steps = times.size - 1
    series = np.empty((len(names), times.size)) if names else None
    stored_t, stored = [], []
    h = dt
    half = 0.5 * h

    def record(i, y):
        if series is not None:
            series[:, i] = np.real(omat @ y)
        if monitor is not None and (i % check_every == 0 or i == n_steps):
            monitor.check(y, times[i])
        if store_every and (i % store_every == 0 or i == n_steps):
            stored_t.append(times[i])
            stored.append(y.reshape(monitor.n, monitor.n).copy())

    record(0, y)
    for i in range(n_steps):
        t = times[i]
        if drive is not None and drive[2] <= t + h and t <= drive[3]:
            Lp, f = drive[0], drive[1]
            f0, f1, f2 = f(t), f(t + half), f(t + h)
            k1 = L0 @ y + f0 * (Lp @ y)
            y2 = y + half * k1
            k2 = L0 @ y2 + f1 * (Lp @ y2)
            y3 = y + half * k2
            k3 = L0 @ y3 + f1 * (Lp @ y3)
            y4 = y + h * k3
            k4 = L0 @ y4 + f2 * (Lp @ y4)
        else:
            k1 = L0 @ y
            k2 = L0 @ (y + half * k1)
            k3 = L0 @ (y + half * k2)
            k4 = L0 @ (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        record(i + 1, y)
    obs_out = {name: series[k] for k, name in enumerate(names)} if names else {}
    return y, obs_out, np.array(stored_t), stored


def evolve(rho0, H: Operator, dset: DissipatorSet, t_end: float, dt: float,
           observables: dict | None = None, store_every: int | None = 50,
           check_every: int = 50, t_start: float = 0.0,
           raise_on_breach: bool = True) -> Trajectory:
    """Integrate ``d rho/dt = i[rho, H] + sum_c L_c rho`` from ``t_start`` to ``t_end``.

    Parameters
    ----------
    rho0 : array or Operator
        Bare-basis initial density matrix.
    observables : dict, optional
        ``name -> Operator``; ``Tr[O rho(t)]`` (real part) is recorded every step.
    store_every : int or None
        Keep the full state every this many steps (``None`` or 0 disables).

    Raises
    ------
    StepSizeError
        If ``dt`` exceeds :func:`stability_bound`.
    InvariantError
        If trace or positivity drift beyond 1e-7.
    """
    return _run(rho0, H, dset, t_start, t_end, dt, observables, store_every,
                check_every, raise_on_breach, drive=None)


def resolve_carrier(pulse: PulseParams, basis: DressedBasis) -> float:
    """Carrier frequency; defaults to the dressed-vacuum transition ``w_0~ - w_s``."""
    if pulse.omega_drive is not None:
        return float(pulse.omega_drive)
    return float(basis.energies[basis.dressed_ground_index] - basis.energies[0])


def evolve_driven(rho0, H: Operator, pulse: PulseParams, dset: DissipatorSet,
                  t_start: float, t_end: float, dt: float,
                  observables: dict | None = None, store_every: int | None = 50,
                  check_every: int = 50, raise_on_breach: bool = True) -> Trajectory:
    """As :func:`evolve` with ``H(t) = H + envelope(t) (s_gs + s_sg)``.

    The pulse is centred at ``t = 0``; ``t_start`` must be at or before
    ``-4 sigma``. The drive is evaluated at the RK4 stage times and switched
    off once the Gaussian falls below ``exp(-50)`` of its peak.
    """
    if t_start > -4.0 * pulse.sigma + 1e-12:
        raise ValueError(f"t_start={t_start} must be <= -4 sigma = {-4 * pulse.sigma}")
    basis = dset.basis
    w = resolve_carrier(pulse, basis)
    pd = basis.to_dressed(build_pulse_operator(basis.space))
    Lp = commutator_superoperator(pd)

    def f(t):
        return float(gaussian_envelope(t, pulse)) * np.cos(w * t)

    reach = 10.0 * pulse.sigma
    drive = (Lp, f, -reach, reach) if pulse.amplitude_scale != 0 else None
    return _run(rho0, H, dset, t_start, t_end, dt, observables, store_every,
                check_every, raise_on_breach, drive=drive, drive_norm=float(np.max(np.abs(pd)))
                * float(gaussian_envelope(0.0, pulse)))


def _run(rho0, H, dset, t_start, t_end, dt, observables, store_every, check_every,
         raise_on_breach, drive, drive_norm=0.0):
    basis = dset.basis
    if H.space != basis.space:
        raise ValueError("Hamiltonian and dissipators act on different spaces")
    bound = 0.5 / (0.5 / stability_bound(H, dset) + 2.0 * drive_norm)
    if dt > bound:
        raise StepSizeError(f"dt={dt} exceeds the stability bound {bound:.4g}")
    n_steps = _n_steps(t_start, t_end, dt)
    times = t_start + dt * np.arange(n_steps + 1)
    rho0 = np.asarray(rho0.data if isinstance(rho0, Operator) else rho0, dtype=complex)
    if rho0.shape != (basis.dim, basis.dim):
        raise ValueError("initial state has the wrong dimension")
    y0 = basis.to_dressed(rho0).ravel().copy()
    L0 = liouvillian(H, dset)
    monitor = _Monitor(basis.dim, raise_on_breach)
    obs = _obs_matrix(observables, basis)
    log.debug("propagating %d steps, dim=%d, nnz=%d", n_steps, basis.dim, L0.nnz)
    _, series, st, states = _propagate(L0, y0, times, dt, drive=drive, obs=obs,
                                       store_every=store_every, check_every=check_every,
                                       monitor=monitor)
    return Trajectory(basis=basis, times=times, observables=series, state_times=st,
                      states=states, max_trace_error=monitor.max_trace_error,
                      min_eigenvalue=monitor.min_eigenvalue, dt=dt)


def propagate_adjoint(L: sp.csr_matrix, b: np.ndarray, dt: float, n_steps: int,
                      every: int) -> np.ndarray:
    """RK4 for ``du/dtau = L^T u``; returns ``u`` every ``every`` steps (rows)."""
    LT = L.T.tocsr()
    out = [b.copy()]
    u = b.copy()
    half = 0.5 * dt
    for i in range(1, n_steps + 1):
        k1 = LT @ u
        k2 = LT @ (u + half * k1)
        k3 = LT @ (u + half * k2)
        k4 = LT @ (u + dt * k3)
        u = u + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        if i % every == 0:
            out.append(u.copy())
    return np.array(out)

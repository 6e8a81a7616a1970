"""Two-time correlations by quantum regression and the transient emission spectrum.

For ``t' = t + tau >= t`` the regression theorem gives

    <A(t) B(t + tau)> = Tr[B Lambda_tau(rho(t) A)],

and by linearity this equals ``u(tau) . vec(rho(t) A)`` with
``u(tau) = exp(L^T tau) vec(B^T)``. One adjoint propagation of ``B`` thus
serves every start time ``t``. The lower triangle uses the mirrored
expression with ``A`` propagated, or conjugate symmetry when ``B = A^dag``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dissipation import DissipatorSet, liouvillian
from .dynamics import evolve, propagate_adjoint
from .hilbert import Operator

PEAK_THRESHOLD = 0.01


@dataclass
class Peak:
    position: float
    height: float


@dataclass
class SpectrumResult:
    frequencies: np.ndarray
    values: np.ndarray
    peaks: list[Peak]
    raw_min: float
    imag_residual: float
    metadata: dict = field(default_factory=dict)


def _uniform(t_grid) -> tuple[np.ndarray, float]:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise ValueError("time grid needs at least two points")
    d = np.diff(t)
    if np.max(np.abs(d - d[0])) > 1e-9 * max(1.0, abs(d[0])):
        raise ValueError("time grid must be uniform")
    return t, float(d[0])


def _substeps(delta: float, dt: float | None) -> tuple[float, int]:
    if dt is None:
        dt = min(delta, 2e-3)
    k = max(1, int(round(delta / dt)))
    return delta / k, k


class _Kernel:
    """States on the grid and adjoint-propagated operators, in the dressed frame."""

    def __init__(self, rho0, A: Operator, B: Operator, t_grid, dset: DissipatorSet,
                 H: Operator | None = None, dt: float | None = None):
        basis = dset.basis
        H = basis.hamiltonian if H is None else H
        t, delta = _uniform(t_grid)
        h, k = _substeps(delta, dt)
        self.t = t
        self.delta = delta
        n_steps = k * (t.size - 1)
        traj = evolve(rho0, H, dset, t_start=t[0], t_end=t[0] + h * n_steps, dt=h,
                      store_every=k, observables=None)
        self.trajectory = traj
        self.states = np.array(traj.states)  # (Nt, N, N)
        L = liouvillian(H, dset)
        self.Ad = basis.to_dressed(A)
        self.Bd = basis.to_dressed(B)
        self.hermitian_pair = np.allclose(self.Bd, self.Ad.conj().T, atol=1e-12)
        self.UB = propagate_adjoint(L, self.Bd.T.ravel().astype(complex), h, n_steps, k)
        self.UA = None if self.hermitian_pair else propagate_adjoint(
            L, self.Ad.T.ravel().astype(complex), h, n_steps, k)

    def upper_rows(self, rows: slice) -> np.ndarray:
        """``G[i, m] = <A(t_i) B(t_i + tau_m)>`` for the selected rows."""
        m = np.einsum("tab,bc->tac", self.states[rows], self.Ad).reshape(
            self.states[rows].shape[0], -1)
        return m @ self.UB.T

    def lower_rows(self, rows: slice) -> np.ndarray:
        """``H[j, m] = <A(t_j + tau_m) B(t_j)>``."""
        if self.hermitian_pair:
            return self.upper_rows(rows).conj()
        m = np.einsum("ab,tbc->tac", self.Bd, self.states[rows]).reshape(
            self.states[rows].shape[0], -1)
        return m @ self.UA.T


def two_time_correlation(rho0, A: Operator, B: Operator, t_grid, dset: DissipatorSet,
                         H: Operator | None = None, dt: float | None = None) -> np.ndarray:
    """``C[i, j] = <A(t_i) B(t_j)>`` on a uniform grid starting at ``rho0``'s time.

    ``dt`` is the RK4 substep (default: the grid step, capped at 2e-3, divided
    evenly into the grid step).
    """
    ker = _Kernel(rho0, A, B, t_grid, dset, H, dt)
    nt = ker.t.size
    C = np.empty((nt, nt), dtype=complex)
    G = ker.upper_rows(slice(None))
    Hl = ker.lower_rows(slice(None))
    for i in range(nt):
        C[i, i:] = G[i, : nt - i]
        C[i:, i] = Hl[i, : nt - i]
    return C


def _spectrum_from_kernel(ker: _Kernel, omega: np.ndarray, block: int = 256):
    nt = ker.t.size
    g = np.zeros(nt, dtype=complex)  # sum_i <A(t_i) B(t_i + tau_m)>, valid part
    for start in range(0, nt, block):
        rows = slice(start, min(nt, start + block))
        G = ker.upper_rows(rows)
        i = np.arange(rows.start, rows.stop)[:, None]
        mvec = np.arange(nt)[None, :]
        G = np.where(i + mvec <= nt - 1, G, 0.0)
        g += G.sum(axis=0)
    diag = g[0]
    if not ker.hermitian_pair:
        raise ValueError("spectrum requires B = A^dag")
    tau = ker.delta * np.arange(nt)
    phase = np.exp(1j * np.outer(omega, tau[1:]))
    upper = phase @ g[1:]
    # lower triangle is the conjugate of the upper one
    s = ker.delta**2 * (diag + upper + np.conj(upper)) / (2.0 * np.pi)
    return s, g


def find_peaks(x: np.ndarray, y: np.ndarray, threshold: float = PEAK_THRESHOLD) -> list[Peak]:
    """Local maxima above ``threshold * max(y)`` with parabolic refinement."""
    ymax = float(np.max(y))
    peaks = []
    for i in range(1, y.size - 1):
        if y[i] > y[i - 1] and y[i] >= y[i + 1] and y[i] >= threshold * ymax:
            y0, y1, y2 = y[i - 1], y[i], y[i + 1]
            den = y0 - 2 * y1 + y2
            off = 0.5 * (y0 - y2) / den if den != 0 else 0.0
            off = float(np.clip(off, -0.5, 0.5))
            step = x[i + 1] - x[i]
            peaks.append(Peak(float(x[i] + off * step), float(y1 - 0.25 * (y0 - y2) * off)))
    return sorted(peaks, key=lambda p: p.position)


def outside_ground_sector(rho_dressed: np.ndarray, basis) -> float:
    """Population not in a state with every atom in ``s``."""
    mask = np.array([not all(p) for p in basis.s_pattern])
    return float(np.real(np.sum(np.diag(rho_dressed)[mask])))


def emission_spectrum(rho0, dset: DissipatorSet, sigma_plus: Operator, t_end: float,
                      n_t: int, omega_grid, dt: float | None = None,
                      H: Operator | None = None, completeness_tol: float = 1e-4,
                      threshold: float = PEAK_THRESHOLD) -> SpectrumResult:
    """Finite-window spectrum ``S(w) = 1/2pi sum_{t,t'} <s^-(t) s^+(t')> e^{-iw(t-t')} dt^2``.

    The kernel is sampled on ``n_t`` uniform points over ``[0, t_end]``. The
    result is max-normalized; negative residue is clipped after recording it.

    Raises
    ------
    ValueError
        If more than ``completeness_tol`` of the population has not reached
        the all-``s`` sector by ``t_end``.
    """
    omega = np.asarray(omega_grid, dtype=float)
    t_grid = np.linspace(0.0, t_end, n_t)
    ker = _Kernel(rho0, sigma_plus.dag(), sigma_plus, t_grid, dset, H, dt)
    left = outside_ground_sector(ker.states[-1], dset.basis)
    if left > completeness_tol:
        raise ValueError(
            f"transient incomplete: population {left:.2e} outside the all-s sector at t_end={t_end}")
    s, _ = _spectrum_from_kernel(ker, omega)
    re = np.real(s)
    imag_res = float(np.max(np.abs(np.imag(s))) / max(np.max(np.abs(re)), 1e-300))
    smax = float(np.max(re))
    raw_min = float(np.min(re) / smax)
    vals = np.clip(re / smax, 0.0, None)
    peaks = find_peaks(omega, vals, threshold)
    meta = {
        "t_end": t_end,
        "n_t": n_t,
        "dt_kernel": ker.delta,
        "dt_integrator": ker.trajectory.dt,
        "resolution": 2.0 * np.pi / t_end,
        "omega_step": float(omega[1] - omega[0]) if omega.size > 1 else 0.0,
        "residual_population": left,
        "max_raw": smax,
    }
    return SpectrumResult(omega, vals, peaks, raw_min, imag_res, meta)

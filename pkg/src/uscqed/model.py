"""Hamiltonians for a cascade three-level emitter coupled to one cavity mode.

Frequencies are in units of the cavity frequency (``omega0 = 1``), times in
units of ``1/omega0``. Only the ``g <-> e`` transition couples to the cavity,
so the ``s`` level forms a decoupled harmonic ladder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import HilbertSpace, Operator, make_destroy, make_number, make_transition


@dataclass(frozen=True)
class ModelParams:
    """Bare frequencies and coupling.

    Defaults are the zero-detuning parameter set with ``omega_gs = 3.5``.
    """

    omega_r: float = 0.0
    omega0: float = 1.0
    omega_s: float = 0.0
    omega_g: float = 3.5
    omega_e: float = 4.5

    def __post_init__(self):
        if not self.omega_s < self.omega_g < self.omega_e:
            raise ValueError("level frequencies must satisfy omega_s < omega_g < omega_e")
        if self.omega_r < 0:
            raise ValueError("coupling omega_r must be non-negative")
        if self.omega0 <= 0:
            raise ValueError("omega0 must be positive")

    @classmethod
    def zero_detuning(cls, omega_r: float, omega_gs: float = 3.5, omega0: float = 1.0):
        return cls(omega_r=omega_r, omega0=omega0, omega_s=0.0,
                   omega_g=omega_gs, omega_e=omega_gs + omega0)

    @property
    def omega_gs(self) -> float:
        return self.omega_g - self.omega_s

    @property
    def omega_eg(self) -> float:
        return self.omega_e - self.omega_g

    @property
    def detuning(self) -> float:
        return self.omega_eg - self.omega0


@dataclass(frozen=True)
class PulseParams:
    """Gaussian pulse ``A(t) cos(omega_drive t)`` centred at ``t = 0``.

    ``omega_drive=None`` means "resonant with the dressed ground transition",
    resolved by :func:`uscqed.dynamics.evolve_driven` from the dressed spectrum.
    """

    sigma: float
    omega_drive: float | None = None
    amplitude_scale: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("pulse width sigma must be positive")


def _emitter_terms(params: ModelParams, space: HilbertSpace, atom: int) -> Operator:
    h = params.omega_s * make_transition(space, "s", "s", atom)
    h = h + params.omega_g * make_transition(space, "g", "g", atom)
    return h + params.omega_e * make_transition(space, "e", "e", atom)


def _bare_part(params: ModelParams, space: HilbertSpace) -> Operator:
    h = params.omega0 * make_number(space)
    for atom in range(space.n_atoms):
        h = h + _emitter_terms(params, space, atom)
    return h


def build_hamiltonian(params: ModelParams, space: HilbertSpace) -> Operator:
    """Full light-matter Hamiltonian including counter-rotating terms.

    ``H = w0 a^dag a + sum_alpha w_alpha s_aa + W_R (a + a^dag)(s_eg + s_ge)``,
    with emitter and coupling terms summed over identical atoms.
    """
    a = make_destroy(space)
    x = a + a.dag()
    h = _bare_part(params, space)
    for atom in range(space.n_atoms):
        s_eg = make_transition(space, "e", "g", atom)
        h = h + params.omega_r * (x @ (s_eg + s_eg.dag()))
    return h


def build_rwa_hamiltonian(params: ModelParams, space: HilbertSpace) -> Operator:
    """Rotating-wave counterpart: coupling ``W_R (a s_eg + a^dag s_ge)``."""
    a = make_destroy(space)
    h = _bare_part(params, space)
    for atom in range(space.n_atoms):
        s_eg = make_transition(space, "e", "g", atom)
        h = h + params.omega_r * (a @ s_eg + a.dag() @ s_eg.dag())
    return h


def excitation_number(space: HilbertSpace) -> Operator:
    """``a^dag a + sum sigma_ee``, conserved by the RWA Hamiltonian."""
    n = make_number(space)
    for atom in range(space.n_atoms):
        n = n + make_transition(space, "e", "e", atom)
    return n


def parity_operator(space: HilbertSpace) -> Operator:
    """``(-1)^{a^dag a}`` times ``(s_gg - s_ee + s_ss)`` on every atom."""
    diag = np.empty(space.dim)
    sign = {"s": 1.0, "g": 1.0, "e": -1.0}
    for i, (n, levels) in enumerate(space.labels()):
        p = (-1.0) ** n
        for lab in levels:
            p *= sign[lab]
        diag[i] = p
    return Operator(space, np.diag(diag))


def pulse_envelope(t, pulse: PulseParams, omega_drive: float | None = None):
    """Scalar drive prefactor multiplying ``s_gs + s_sg``.

    ``amplitude_scale * sqrt(pi / (2 sigma^2)) * exp(-t^2 / (2 sigma^2)) * cos(w t)``.
    The Gaussian part integrates to ``pi * amplitude_scale``.
    """
    w = pulse.omega_drive if omega_drive is None else omega_drive
    if w is None:
        raise ValueError("pulse carrier frequency is unresolved")
    return gaussian_envelope(t, pulse) * np.cos(w * np.asarray(t))


def gaussian_envelope(t, pulse: PulseParams):
    s2 = pulse.sigma**2
    t = np.asarray(t, dtype=float)
    return pulse.amplitude_scale * np.sqrt(np.pi / (2.0 * s2)) * np.exp(-t * t / (2.0 * s2))


def build_pulse_operator(space: HilbertSpace) -> Operator:
    """``s_gs + s_sg`` summed over atoms."""
    out = None
    for atom in range(space.n_atoms):
        s_gs = make_transition(space, "g", "s", atom)
        term = s_gs + s_gs.dag()
        out = term if out is None else out + term
    return out

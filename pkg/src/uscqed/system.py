"""Convenience bundle: space, Hamiltonian, dressed basis, baths and observables."""

from __future__ import annotations

from functools import cached_property

from .dissipation import build_dissipators
from .dressed import diagonalize
from .dynamics import evolve, evolve_driven, initial_state
from .hilbert import HilbertSpace
from .model import ModelParams, PulseParams, build_hamiltonian
from .observables import ObservableSet, projector_operator


class System:
    """Everything needed to propagate one parameter set.

    Parameters
    ----------
    params : ModelParams
    rates : dict
        ``{"cavity": gamma0, "eg": gamma_eg, "gs": gamma_gs}`` in units of omega0.
    n_fock, n_atoms : int
    band : tuple, optional
        Frequency window applied to ``X^+``.
    spectral_weight : callable, optional
        Bath weighting hook forwarded to :func:`build_dissipators`.
    """

    def __init__(self, params: ModelParams, rates: dict, n_fock: int, n_atoms: int = 1,
                 band=None, spectral_weight=None):
        self.params = params
        self.rates = dict(rates)
        self.space = HilbertSpace(n_fock=n_fock, n_atoms=n_atoms)
        self.band = band
        self.spectral_weight = spectral_weight

    @cached_property
    def H(self):
        return build_hamiltonian(self.params, self.space)

    @cached_property
    def basis(self):
        return diagonalize(self.H)

    @cached_property
    def dissipators(self):
        return build_dissipators(self.basis, self.rates, spectral_weight=self.spectral_weight)

    @cached_property
    def obs(self) -> ObservableSet:
        return ObservableSet.from_basis(self.basis, gamma0=self.rates.get("cavity", 0.0),
                                        band=self.band)

    def recorded_operators(self) -> dict:
        ops = self.obs.operators()
        ops["P_dressed_ground"] = projector_operator("dressed_ground", self.basis)
        ops["P_s0"] = projector_operator("s0", self.basis)
        return ops

    def initial_state(self, kind: str = "dressed_ground", custom=None):
        return initial_state(kind, self.basis, custom)

    def evolve(self, t_end: float, dt: float, initial: str = "dressed_ground", **kw):
        kw.setdefault("observables", self.recorded_operators())
        kw.setdefault("store_every", None)
        return evolve(self.initial_state(initial), self.H, self.dissipators, t_end, dt, **kw)

    def evolve_driven(self, pulse: PulseParams, t_start: float, t_end: float, dt: float,
                      initial: str = "bare", **kw):
        kw.setdefault("observables", self.recorded_operators())
        kw.setdefault("store_every", None)
        return evolve_driven(self.initial_state(initial), self.H, pulse, self.dissipators,
                             t_start, t_end, dt, **kw)

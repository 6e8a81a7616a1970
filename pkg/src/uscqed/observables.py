"""Detection-level observables built from positive-frequency operators.

In the ultrastrong regime the detected photon rate is proportional to
``<X^- X^+>`` rather than ``<a^dag a>``, where ``X^+`` is the
energy-lowering part of ``X = a + a^dag`` in the dressed basis. The emitter
side uses the same split of the polarization ``s_gs + s_sg``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dressed import DressedBasis, positive_frequency_part
from .hilbert import Operator, make_destroy
from .model import build_pulse_operator

FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class ObservableSet:
    """Cached ``X^+/-`` and ``sigma^+/-`` for one dressed basis.

    ``gamma0`` converts photon number into output flux (units of ``omega0``).
    """

    basis: DressedBasis
    X_plus: Operator
    X_minus: Operator
    sigma_plus: Operator
    sigma_minus: Operator
    gamma0: float = 0.0

    @classmethod
    def from_basis(cls, basis: DressedBasis, gamma0: float = 0.0, band=None) -> "ObservableSet":
        """Build the cache; ``band=(w_min, w_max)`` filters ``X^+`` transitions."""
        a = make_destroy(basis.space)
        xp = positive_frequency_part(a + a.dag(), basis, band=band)
        sp = positive_frequency_part(build_pulse_operator(basis.space), basis)
        return cls(basis, xp, xp.dag(), sp, sp.dag(), float(gamma0))

    def operators(self) -> dict[str, Operator]:
        """Operators whose expectations determine every reported statistic."""
        xp, xm, spl, smi = self.X_plus, self.X_minus, self.sigma_plus, self.sigma_minus
        xpxp = xp @ xp
        return {
            "n_phys": xm @ xp,
            "xxxx": xpxp.dag() @ xpxp,
            "sigma_n": smi @ spl,
            "g3_num": smi @ xpxp.dag() @ xpxp @ spl,
        }


def _rho(rho) -> np.ndarray:
    return rho.data if isinstance(rho, Operator) else np.asarray(rho)


def expect(op: Operator, rho) -> complex:
    r = _rho(rho)
    if r.shape != op.data.shape:
        raise ValueError(f"density matrix shape {r.shape} does not match operator {op.data.shape}")
    return complex(np.sum(op.data.T * r))


def _real(op: Operator, rho) -> float:
    return float(np.real(expect(op, rho)))


def mean_physical_photons(rho, obs: ObservableSet) -> float:
    """``Tr[X^- X^+ rho]``."""
    return _real(obs.X_minus @ obs.X_plus, rho)


def output_flux(rho, obs: ObservableSet) -> float:
    """Output photon rate ``gamma0 <X^- X^+>`` for a vacuum input (units of omega0)."""
    return obs.gamma0 * mean_physical_photons(rho, obs)


def _ratio(num: float, den: float, floor: float = FLOOR) -> float:
    return num / den if den > floor else float("nan")


def g2(rho, obs: ObservableSet, floor: float = FLOOR) -> float:
    """Equal-time ``<X^- X^- X^+ X^+> / <X^- X^+>^2``; NaN when the cavity is empty."""
    n = mean_physical_photons(rho, obs)
    xx = obs.X_plus @ obs.X_plus
    return _ratio(_real(xx.dag() @ xx, rho), n * n, floor)


def big_g2(rho, obs: ObservableSet, floor: float = FLOOR) -> float:
    """Coincidence-to-detection ratio ``g2 * <X^- X^+>``."""
    n = mean_physical_photons(rho, obs)
    if n <= floor:
        return 0.0
    xx = obs.X_plus @ obs.X_plus
    return _real(xx.dag() @ xx, rho) / n


def g3(rho, obs: ObservableSet, floor: float = FLOOR) -> float:
    """``<s^- X^- X^- X^+ X^+ s^+> / (<s^- s^+> <X^- X^+>^2)``."""
    ops = obs.operators()
    n = _real(ops["n_phys"], rho)
    s = _real(ops["sigma_n"], rho)
    return _ratio(_real(ops["g3_num"], rho), s * n * n, floor) if s > floor else float("nan")


def statistics_from_moments(moments: dict, floor: float = FLOOR) -> dict:
    """Vectorized g2, G2, g3 from recorded moment series (see ``ObservableSet.operators``)."""
    n = np.asarray(moments["n_phys"], dtype=float)
    xxxx = np.asarray(moments["xxxx"], dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        den2 = n * n
        g2s = np.where(den2 > floor, xxxx / den2, np.nan)
        G2s = np.where(n > floor, xxxx / n, 0.0)
        out = {"n_phys": n, "g2": g2s, "G2": G2s}
        if "sigma_n" in moments and "g3_num" in moments:
            s = np.asarray(moments["sigma_n"], dtype=float)
            num = np.asarray(moments["g3_num"], dtype=float)
            den3 = s * den2
            out["g3"] = np.where((den2 > floor) & (s > floor), num / den3, np.nan)
    return out


def resolve_state(spec, basis: DressedBasis) -> np.ndarray:
    """Bare-basis ket for a state spec.

    Accepted specs: an integer dressed index, ``"dressed_ground"``,
    ``"global_ground"``, ``"s<n>"`` (bare ``|s,...,s,n>``) or a tuple
    ``(n, level, ...)`` naming a bare state.
    """
    space = basis.space
    if isinstance(spec, (int, np.integer)):
        if not 0 <= spec < basis.dim:
            raise ValueError(f"dressed index {spec} out of range")
        return basis.vectors[:, int(spec)]
    if spec == "dressed_ground":
        return basis.vectors[:, basis.dressed_ground_index]
    if spec == "global_ground":
        return basis.vectors[:, 0]
    if isinstance(spec, str) and spec.startswith("s") and spec[1:].isdigit():
        return space.basis_vector(int(spec[1:]), *("s",) * space.n_atoms)
    if isinstance(spec, tuple) and len(spec) == 1 + space.n_atoms:
        return space.basis_vector(int(spec[0]), *spec[1:])
    raise ValueError(f"unknown state spec {spec!r}")


def population(rho, spec, basis: DressedBasis) -> float:
    """``<psi|rho|psi>`` for the state named by ``spec``."""
    v = resolve_state(spec, basis)
    r = _rho(rho)
    return float(np.real(v.conj() @ r @ v))


def projector_operator(spec, basis: DressedBasis) -> Operator:
    v = resolve_state(spec, basis)
    return Operator(basis.space, np.outer(v, v.conj()))

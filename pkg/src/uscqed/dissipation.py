"""Zero-temperature Lindblad dissipators written in the dressed basis.

Each loss channel couples to a Hermitian system operator ``s_c``
(``a + a^dag`` for the cavity, ``s_eg + s_ge`` and ``s_gs + s_sg`` for the
emitter). Only energy-lowering transitions ``|k> -> |j>`` (``w_k > w_j``)
appear, with weight ``gamma_c |<j|s_c|k>|^2``. Transitions of one channel
sharing a frequency (within ``DEGENERACY_EPS``) are summed coherently into a
single jump operator; distinct frequencies are kept separate.

Superoperators act on density matrices flattened in row-major order, i.e.
``vec(rho)[a * N + b] = rho[a, b]``, in the dressed frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .dressed import DEGENERACY_EPS, DressedBasis
from .hilbert import Operator, make_destroy, make_transition

CHANNELS = ("cavity", "eg", "gs")
PRUNE = 1e-14


@dataclass(frozen=True)
class JumpGroup:
    """One jump operator ``L = sum_p amp_p |rows_p><cols_p|`` (dressed frame)."""

    channel: str
    atom: int | None
    frequency: float
    rows: np.ndarray
    cols: np.ndarray
    amps: np.ndarray


@dataclass(frozen=True)
class Transition:
    channel: str
    atom: int | None
    j: int
    k: int
    frequency: float
    weight: float


@dataclass(frozen=True, eq=False)
class DissipatorSet:
    basis: DressedBasis
    rates: dict
    groups: tuple[JumpGroup, ...]
    transitions: tuple[Transition, ...]
    _cache: dict = field(default_factory=dict, repr=False)

    def decay_rates(self) -> np.ndarray:
        """Total outgoing rate of every dressed state (diagonal of ``sum L^dag L``)."""
        out = np.zeros(self.basis.dim)
        for tr in self.transitions:
            out[tr.k] += tr.weight
        return out

    def weights(self, channel: str | None = None) -> np.ndarray:
        """Dense ``(N, N)`` array of ``Gamma^{jk}`` summed over the selected channel(s)."""
        w = np.zeros((self.basis.dim, self.basis.dim))
        for tr in self.transitions:
            if channel is None or tr.channel == channel:
                w[tr.j, tr.k] += tr.weight
        return w

    def total_rate(self) -> float:
        return float(sum(tr.weight for tr in self.transitions))

    def jump_matrices(self) -> list[np.ndarray]:
        n = self.basis.dim
        out = []
        for g in self.groups:
            m = np.zeros((n, n), dtype=complex)
            m[g.rows, g.cols] = g.amps
            out.append(m)
        return out


def coupling_operators(space) -> list[tuple[str, int | None, Operator]]:
    """``(channel, atom, s_c)`` for every bath, in a fixed order."""
    a = make_destroy(space)
    ops = [("cavity", None, a + a.dag())]
    for atom in range(space.n_atoms):
        s_eg = make_transition(space, "e", "g", atom)
        ops.append(("eg", atom, s_eg + s_eg.dag()))
    for atom in range(space.n_atoms):
        s_gs = make_transition(space, "g", "s", atom)
        ops.append(("gs", atom, s_gs + s_gs.dag()))
    return ops


def build_dissipators(basis: DressedBasis, rates: dict,
                      spectral_weight: Callable[[str, float], float] | None = None,
                      eps: float = DEGENERACY_EPS) -> DissipatorSet:
    """Dressed-basis jump operators for the cavity, ``e->g`` and ``g->s`` baths.

    Parameters
    ----------
    basis : DressedBasis
    rates : dict
        Base rates keyed by ``"cavity"``, ``"eg"``, ``"gs"``; missing keys are 0.
    spectral_weight : callable, optional
        ``f(channel, omega) -> factor`` multiplying each transition weight.
        Defaults to a flat bath (factor 1).
    """
    unknown = set(rates) - set(CHANNELS)
    if unknown:
        raise ValueError(f"unknown loss channel(s): {sorted(unknown)}")
    for name, r in rates.items():
        if r < 0:
            raise ValueError(f"negative rate for channel {name!r}: {r}")
    energies = basis.energies
    freq = energies[None, :] - energies[:, None]  # w_k - w_j at [j, k]
    groups, transitions = [], []
    for channel, atom, s_op in coupling_operators(basis.space):
        gamma = float(rates.get(channel, 0.0))
        if gamma == 0.0:
            continue
        s_d = basis.to_dressed(s_op)
        keep = (freq > eps) & (np.abs(s_d) ** 2 >= PRUNE)
        js, ks = np.nonzero(keep)
        w = freq[js, ks]
        factor = np.ones(w.size) if spectral_weight is None else np.array(
            [spectral_weight(channel, x) for x in w], dtype=float)
        if np.any(factor < 0):
            raise ValueError("spectral weight must be non-negative")
        amps = np.sqrt(gamma * factor) * s_d[js, ks]
        for j, k, x, amp in zip(js, ks, w, amps):
            transitions.append(Transition(channel, atom, int(j), int(k), float(x), float(abs(amp) ** 2)))
        order = np.argsort(w, kind="stable")
        js, ks, w, amps = js[order], ks[order], w[order], amps[order]
        splits = np.nonzero(np.diff(w) > eps)[0] + 1
        for idx in np.split(np.arange(w.size), splits):
            if idx.size == 0:
                continue
            groups.append(JumpGroup(channel, atom, float(np.mean(w[idx])),
                                    js[idx], ks[idx], amps[idx]))
    return DissipatorSet(basis=basis, rates=dict(rates), groups=tuple(groups),
                         transitions=tuple(transitions))


def _dressed_hamiltonian(basis: DressedBasis, H: Operator | None):
    """Return ``(energies, None)`` when H is diagonal in ``basis``, else ``(None, matrix)``."""
    if H is None or H is basis.hamiltonian:
        return basis.energies, None
    if H.space != basis.space:
        raise ValueError("Hamiltonian and dissipators act on different spaces")
    hd = basis.to_dressed(H)
    off = hd - np.diag(np.diag(hd))
    if np.max(np.abs(off)) <= 1e-10 * max(1.0, np.max(np.abs(hd))):
        return np.real(np.diag(hd)), None
    return None, hd


def commutator_superoperator(m: np.ndarray) -> sp.csr_matrix:
    """Superoperator of ``rho -> -i [m, rho]`` (row-major vec)."""
    n = m.shape[0]
    eye = sp.identity(n, format="csr", dtype=complex)
    ms = sp.csr_matrix(m)
    return (-1j * (sp.kron(ms, eye) - sp.kron(eye, ms.T))).tocsr()


def dissipator_superoperator(dset: DissipatorSet) -> sp.csr_matrix:
    """``sum_g L rho L^dag - 1/2 {L^dag L, rho}`` as a sparse matrix."""
    cached = dset._cache.get("dissipator")
    if cached is not None:
        return cached
    n = dset.basis.dim
    rows, cols, vals = [], [], []
    kmat = sp.csr_matrix((n, n), dtype=complex)
    kdiag = np.zeros(n, dtype=complex)
    for g in dset.groups:
        if g.rows.size == 1:
            j, k, c = g.rows[0], g.cols[0], g.amps[0]
            rows.append(np.array([j * n + j]))
            cols.append(np.array([k * n + k]))
            vals.append(np.array([abs(c) ** 2]))
            kdiag[k] += abs(c) ** 2
            continue
        # L rho L^dag couples rho[k_p, k_q] -> [j_p, j_q]
        jp, jq = np.meshgrid(g.rows, g.rows, indexing="ij")
        kp, kq = np.meshgrid(g.cols, g.cols, indexing="ij")
        rows.append((jp * n + jq).ravel())
        cols.append((kp * n + kq).ravel())
        vals.append(np.outer(g.amps, g.amps.conj()).ravel())
        lmat = sp.csr_matrix((g.amps, (g.rows, g.cols)), shape=(n, n))
        kmat += lmat.conj().T @ lmat
    kmat = (kmat + sp.diags(kdiag)).tocsr()
    jump = sp.csr_matrix(
        (np.concatenate(vals) if vals else np.zeros(0),
         (np.concatenate(rows) if rows else np.zeros(0, int),
          np.concatenate(cols) if cols else np.zeros(0, int))),
        shape=(n * n, n * n), dtype=complex)
    eye = sp.identity(n, format="csr", dtype=complex)
    out = (jump - 0.5 * (sp.kron(kmat, eye) + sp.kron(eye, kmat.T))).tocsr()
    out.sum_duplicates()
    dset._cache["dissipator"] = out
    return out


def liouvillian(H: Operator | None, dset: DissipatorSet) -> sp.csr_matrix:
    """Full generator ``rho -> i [rho, H] + sum_c L_c rho`` in the dressed frame."""
    basis = dset.basis
    n = basis.dim
    energies, hd = _dressed_hamiltonian(basis, H)
    if hd is None:
        diff = energies[:, None] - energies[None, :]
        unitary = sp.diags((-1j * diff).ravel())
    else:
        unitary = commutator_superoperator(hd)
    out = (unitary + dissipator_superoperator(dset)).tocsr()
    assert out.shape == (n * n, n * n)
    return out


def liouvillian_apply(rho, H: Operator, dset: DissipatorSet) -> np.ndarray:
    """Time derivative of a bare-basis density matrix."""
    basis = dset.basis
    rho = rho.data if isinstance(rho, Operator) else np.asarray(rho, dtype=complex)
    if rho.shape != (basis.dim, basis.dim):
        raise ValueError(f"density matrix shape {rho.shape} does not match dim {basis.dim}")
    rd = basis.to_dressed(rho)
    drd = (liouvillian(H, dset) @ rd.ravel()).reshape(rd.shape)
    return basis.to_bare(drd)


def transition_table(dset: DissipatorSet) -> list[tuple]:
    """``(channel, j, k, w_k - w_j, Gamma^{jk})`` rows for audit output."""
    rows = []
    for tr in dset.transitions:
        name = tr.channel if tr.atom is None or dset.basis.space.n_atoms == 1 else f"{tr.channel}{tr.atom}"
        rows.append((name, tr.j, tr.k, tr.frequency, tr.weight))
    return rows

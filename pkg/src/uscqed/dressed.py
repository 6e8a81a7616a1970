"""Dressed (eigen)basis of the full Hamiltonian.

The Hamiltonian conserves which atoms occupy ``s`` and the generalized
parity, so it is diagonalized block by block. This keeps the non-interacting
states exactly equal to bare ``|s, n>`` and every eigenvector parity-pure,
even across degeneracies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hilbert import HilbertSpace, Operator
from .model import ModelParams, build_hamiltonian, build_rwa_hamiltonian, parity_operator

NONINTERACTING = "noninteracting"
INTERACTING = "interacting"

DEGENERACY_EPS = 1e-9
HERMITIAN_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class DressedBasis:
    """Ascending eigenvalues and eigenvectors of ``H``.

    ``vectors[:, j]`` is the bare-basis representation of ``|j>``.
    ``s_pattern[j]`` records, per atom, whether the atom sits in ``s``.
    """

    hamiltonian: Operator
    energies: np.ndarray
    vectors: np.ndarray
    sector: tuple[str, ...]
    parity: np.ndarray
    s_pattern: tuple[tuple[bool, ...], ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def space(self) -> HilbertSpace:
        return self.hamiltonian.space

    @property
    def dim(self) -> int:
        return self.energies.size

    def to_dressed(self, op) -> np.ndarray:
        """Matrix elements ``<j|op|k>`` in the dressed basis."""
        m = op.data if isinstance(op, Operator) else np.asarray(op)
        return self.vectors.conj().T @ m @ self.vectors

    def to_bare(self, m: np.ndarray) -> np.ndarray:
        return self.vectors @ m @ self.vectors.conj().T

    def projector(self, j: int) -> np.ndarray:
        v = self.vectors[:, j]
        return np.outer(v, v.conj())

    @property
    def dressed_ground_index(self) -> int:
        """Index of the lowest state with no atom in ``s``."""
        for j, pat in enumerate(self.s_pattern):
            if not any(pat):
                return j
        raise ValueError("no fully interacting dressed state found")

    @property
    def global_ground_index(self) -> int:
        return 0

    def noninteracting_index(self, n: int) -> int:
        """Index of the dressed state equal to bare ``|s, ..., s, n>``."""
        target = self.space.index(n, *("s",) * self.space.n_atoms)
        col = np.abs(self.vectors[target, :])
        j = int(np.argmax(col))
        if col[j] < 1 - 1e-8:
            raise ValueError(f"|s,{n}> is not an eigenstate of H")
        return j


def _block_keys(space: HilbertSpace) -> list[tuple]:
    par = np.real(np.diag(parity_operator(space).data))
    keys = []
    for i, (n, levels) in enumerate(space.labels()):
        keys.append((tuple(lab == "s" for lab in levels), int(round(par[i]))))
    return keys


def _fix_phase(vecs: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vecs) - 1e-12 * np.arange(vecs.shape[0])[:, None], axis=0)
    piv = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(piv) / piv)[None, :]


def diagonalize(H: Operator) -> DressedBasis:
    """Diagonalize ``H`` into a :class:`DressedBasis`.

    Raises
    ------
    ValueError
        If ``H`` is not Hermitian within 1e-12.
    """
    if not H.is_hermitian(HERMITIAN_ATOL):
        raise ValueError("Hamiltonian is not Hermitian")
    space = H.space
    h = H.data
    keys = _block_keys(space)
    uniq = sorted(set(keys))
    blocks = {k: np.array([i for i, kk in enumerate(keys) if kk == k]) for k in uniq}

    mask = np.zeros(h.shape, dtype=bool)
    for idx in blocks.values():
        mask[np.ix_(idx, idx)] = True
    scale = max(np.max(np.abs(h)), 1.0)
    if np.max(np.abs(h[~mask]), initial=0.0) > 1e-12 * scale:
        # H mixes blocks: fall back to a single dense diagonalization.
        energies, vectors = np.linalg.eigh(h)
    else:
        energies = np.empty(space.dim)
        vectors = np.zeros((space.dim, space.dim), dtype=complex)
        col = 0
        for k in uniq:
            idx = blocks[k]
            e, v = np.linalg.eigh(h[np.ix_(idx, idx)])
            energies[col:col + idx.size] = e
            vectors[idx, col:col + idx.size] = v
            col += idx.size
    vectors = _fix_phase(vectors)

    s_mask = np.array([all(k[0]) for k in keys])
    s_weight = np.sum(np.abs(vectors[s_mask, :]) ** 2, axis=0)
    sector = np.where(s_weight > 1 - 1e-8, NONINTERACTING, INTERACTING)
    par_diag = np.real(np.diag(parity_operator(space).data))
    par_val = np.real(np.einsum("ij,i,ij->j", vectors.conj(), par_diag, vectors))
    parity = np.where(np.abs(np.abs(par_val) - 1) < 1e-6, np.round(par_val), 0).astype(int)

    labels = space.labels()
    in_s = [np.array([lev[atom] == "s" for _, lev in labels]) for atom in range(space.n_atoms)]
    weights = np.abs(vectors) ** 2
    patterns = [
        tuple(bool(weights[m, j].sum() > 0.5) for m in in_s) for j in range(space.dim)
    ]

    # ascending energy; near-ties ordered noninteracting first, then even parity
    order = list(np.argsort(energies, kind="stable"))
    out, start = [], 0
    while start < len(order):
        stop = start + 1
        while stop < len(order) and energies[order[stop]] - energies[order[stop - 1]] <= DEGENERACY_EPS:
            stop += 1
        cluster = order[start:stop]
        cluster.sort(key=lambda j: (sector[j] != NONINTERACTING, -parity[j]))
        out.extend(cluster)
        start = stop
    order = np.array(out)

    return DressedBasis(
        hamiltonian=H,
        energies=energies[order],
        vectors=vectors[:, order],
        sector=tuple(str(s) for s in sector[order]),
        parity=parity[order],
        s_pattern=tuple(patterns[j] for j in order),
    )


@dataclass(frozen=True)
class GroundExpansion:
    """Bare-basis coefficients of the dressed vacuum of a single emitter.

    ``c_g[k]`` multiplies ``|g, 2k>`` and ``c_e[k]`` multiplies ``|e, 2k+1>``.
    """

    c_g: np.ndarray
    c_e: np.ndarray
    residual: float
    energy: float

    def pair_weight(self, i: int) -> float:
        """``|c_{g,2i}|^2``: relative weight of the decay into ``|s, 2i>``."""
        return float(abs(self.c_g[i]) ** 2) if i < self.c_g.size else 0.0


def ground_expansion(basis: DressedBasis) -> GroundExpansion:
    space = basis.space
    if space.n_atoms != 1:
        raise ValueError("ground expansion is defined for a single emitter")
    j = basis.dressed_ground_index
    v = basis.vectors[:, j].copy()
    g0 = v[space.index(0, "g")]
    if abs(g0) > 0:
        v *= abs(g0) / g0
    c_g, c_e, used = [], [], []
    for n in range(0, space.n_fock + 1, 2):
        i = space.index(n, "g")
        c_g.append(v[i])
        used.append(i)
    for n in range(1, space.n_fock + 1, 2):
        i = space.index(n, "e")
        c_e.append(v[i])
        used.append(i)
    rest = np.ones(space.dim, dtype=bool)
    rest[used] = False
    return GroundExpansion(
        c_g=np.array(c_g),
        c_e=np.array(c_e),
        residual=float(np.linalg.norm(v[rest])),
        energy=float(basis.energies[j]),
    )


def positive_frequency_part(op: Operator, basis: DressedBasis, band=None,
                            eps: float = DEGENERACY_EPS) -> Operator:
    """Part of ``op`` that lowers the energy: ``sum_{w_k > w_j + eps} <j|op|k> |j><k|``.

    ``band=(w_min, w_max)`` keeps only transitions whose frequency lies in
    the closed interval. The negative-frequency part is the adjoint.
    """
    if not op.is_hermitian(1e-10):
        raise ValueError("positive-frequency split requires a Hermitian operator")
    m = positive_frequency_matrix(basis, op, band=band, eps=eps)
    return Operator(op.space, basis.to_bare(m))


def positive_frequency_matrix(basis: DressedBasis, op: Operator, band=None,
                              eps: float = DEGENERACY_EPS) -> np.ndarray:
    """Dressed-basis matrix of the positive-frequency part (cached)."""
    key = (id(op), band, eps)
    hit = basis._cache.get(key)
    if hit is not None and hit[0] is op:
        return hit[1]
    m = basis.to_dressed(op)
    w = basis.energies[None, :] - basis.energies[:, None]
    keep = w > eps
    if band is not None:
        keep &= (w >= band[0]) & (w <= band[1])
    m = np.where(keep, m, 0.0)
    m.flags.writeable = False
    basis._cache[key] = (op, m)
    return m


def level_sweep(omega_r_grid, params: ModelParams, space: HilbertSpace, n_levels: int = 8) -> dict:
    """Lowest ``n_levels`` eigenvalues of ``H`` across a coupling grid.

    Returns a dict with ``omega_r`` (G,), ``energies`` (G, M), ``sectors``
    (G, M) and ``rwa_ground`` (G,), the lowest interacting RWA level.
    """
    grid = np.asarray(list(omega_r_grid), dtype=float)
    if grid.size == 0:
        raise ValueError("coupling grid is empty")
    if np.any(np.diff(grid) < 0):
        raise ValueError("coupling grid must be sorted ascending")
    energies = np.empty((grid.size, n_levels))
    sectors = np.empty((grid.size, n_levels), dtype=object)
    rwa = np.empty(grid.size)
    for i, w in enumerate(grid):
        p = _with_coupling(params, w)
        b = diagonalize(build_hamiltonian(p, space))
        energies[i] = b.energies[:n_levels]
        sectors[i] = b.sector[:n_levels]
        r = diagonalize(build_rwa_hamiltonian(p, space))
        rwa[i] = r.energies[r.dressed_ground_index]
    return {"omega_r": grid, "energies": energies, "sectors": sectors, "rwa_ground": rwa}


def _with_coupling(params: ModelParams, omega_r: float) -> ModelParams:
    from dataclasses import replace
    return replace(params, omega_r=float(omega_r))

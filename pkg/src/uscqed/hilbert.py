"""Composite Hilbert space bookkeeping and dense operator algebra.

The canonical factor order is the cavity Fock space first, followed by the
atoms in index order. A composite basis index is therefore

    i = fock_index * n_levels**n_atoms + emitter_index

where ``emitter_index`` enumerates the atom levels with atom 0 as the most
significant digit. Emitter levels are ordered ``s, g, e`` (0, 1, 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number

import numpy as np

LEVELS = ("s", "g", "e")
FOCK = "fock"


@dataclass(frozen=True)
class HilbertSpace:
    """Cavity mode truncated at ``n_fock`` photons times ``n_atoms`` emitters.

    Parameters
    ----------
    n_fock : int
        Fock cutoff; photon numbers run over ``0..n_fock``.
    n_atoms : int
        Number of three-level emitters (1 or 2 in the presets).
    n_levels : int
        Levels per emitter. Only 3 is supported.
    """

    n_fock: int
    n_atoms: int = 1
    n_levels: int = 3

    def __post_init__(self):
        if int(self.n_fock) != self.n_fock or self.n_fock < 1:
            raise ValueError(f"n_fock must be an integer >= 1, got {self.n_fock!r}")
        if self.n_levels != 3:
            raise ValueError("only three-level emitters are supported")
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise ValueError(f"n_atoms must be an integer >= 1, got {self.n_atoms!r}")

    @property
    def fock_dim(self) -> int:
        return self.n_fock + 1

    @property
    def emitter_dim(self) -> int:
        return self.n_levels**self.n_atoms

    @property
    def dim(self) -> int:
        return self.fock_dim * self.emitter_dim

    @property
    def factor_dims(self) -> tuple[int, ...]:
        return (self.fock_dim,) + (self.n_levels,) * self.n_atoms

    def index(self, n: int, *levels: str) -> int:
        """Composite index of the bare state ``|levels..., n>``."""
        if len(levels) != self.n_atoms:
            raise ValueError(f"expected {self.n_atoms} level labels, got {len(levels)}")
        if not 0 <= n <= self.n_fock:
            raise ValueError(f"photon number {n} outside 0..{self.n_fock}")
        em = 0
        for lab in levels:
            em = em * self.n_levels + _level_index(lab)
        return n * self.emitter_dim + em

    def basis_vector(self, n: int, *levels: str) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(n, *levels)] = 1.0
        return v

    def labels(self) -> list[tuple[int, tuple[str, ...]]]:
        """``(n, (level_atom0, ...))`` for every composite index, in order."""
        out = []
        for n in range(self.fock_dim):
            for em in range(self.emitter_dim):
                out.append((n, self._emitter_levels(em)))
        return out

    def _emitter_levels(self, em: int) -> tuple[str, ...]:
        levs = []
        for _ in range(self.n_atoms):
            em, r = divmod(em, self.n_levels)
            levs.append(LEVELS[r])
        return tuple(reversed(levs))


def _level_index(label: str) -> int:
    try:
        return LEVELS.index(label)
    except ValueError:
        raise ValueError(f"unknown level label {label!r}; expected one of {LEVELS}") from None


class Operator:
    """Dense complex matrix acting on a :class:`HilbertSpace`.

    Instances are immutable: the backing array is flagged read-only. Algebra
    between operators on different spaces raises ``ValueError``.
    """

    __slots__ = ("space", "data")

    def __init__(self, space: HilbertSpace, data):
        arr = np.array(data, dtype=complex)
        if arr.shape != (space.dim, space.dim):
            raise ValueError(
                f"operator shape {arr.shape} does not match space dim {space.dim}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Operator is immutable")

    def _check(self, other: "Operator"):
        if not isinstance(other, Operator):
            return NotImplemented
        if other.space != self.space:
            raise ValueError("operators act on different Hilbert spaces")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Operator(self.space, self.data + other.data)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Operator(self.space, self.data - other.data)

    def __neg__(self):
        return Operator(self.space, -self.data)

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return Operator(self.space, scalar * self.data)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.space, self.data @ other.data)
        return self.data @ np.asarray(other)

    def dag(self) -> "Operator":
        return Operator(self.space, self.data.conj().T)

    adjoint = dag

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.data - self.data.conj().T), initial=0.0) <= atol)

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def __repr__(self):
        return f"Operator(dim={self.space.dim}, n_fock={self.space.n_fock}, n_atoms={self.space.n_atoms})"


def identity(space: HilbertSpace) -> Operator:
    return Operator(space, np.eye(space.dim))


def tensor_embed(op, space: HilbertSpace, factor) -> Operator:
    """Embed a single-factor matrix into the full space.

    ``factor`` is ``"fock"`` for the cavity or an integer atom index. The
    result is ``op`` tensored with identities in the canonical order.
    """
    op = np.asarray(op, dtype=complex)
    if factor == FOCK:
        pos = 0
    elif isinstance(factor, (int, np.integer)) and 0 <= factor < space.n_atoms:
        pos = 1 + int(factor)
    else:
        raise ValueError(f"unknown factor {factor!r}")
    dims = space.factor_dims
    if op.shape != (dims[pos], dims[pos]):
        raise ValueError(f"factor operator shape {op.shape} != ({dims[pos]}, {dims[pos]})")
    out = np.ones((1, 1), dtype=complex)
    for k, d in enumerate(dims):
        out = np.kron(out, op if k == pos else np.eye(d))
    return Operator(space, out)


def destroy_matrix(n_fock: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_fock + 1, dtype=float)), 1).astype(complex)


def make_destroy(space: HilbertSpace) -> Operator:
    """Truncated photon annihilation operator ``a``."""
    return tensor_embed(destroy_matrix(space.n_fock), space, FOCK)


def make_number(space: HilbertSpace) -> Operator:
    return tensor_embed(np.diag(np.arange(space.fock_dim, dtype=float)), space, FOCK)


def make_transition(space: HilbertSpace, alpha: str, beta: str, atom_index: int = 0) -> Operator:
    """``|alpha><beta|`` on atom ``atom_index`` (a projector when equal)."""
    if not isinstance(atom_index, (int, np.integer)) or not 0 <= atom_index < space.n_atoms:
        raise ValueError(f"atom_index {atom_index!r} out of range for {space.n_atoms} atom(s)")
    m = np.zeros((space.n_levels, space.n_levels), dtype=complex)
    m[_level_index(alpha), _level_index(beta)] = 1.0
    return tensor_embed(m, space, int(atom_index))

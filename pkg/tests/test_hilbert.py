import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uscqed.hilbert import (HilbertSpace, Operator, identity, make_destroy, make_number,
                            make_transition, tensor_embed)


@pytest.mark.parametrize("n_atoms", [1, 2])
def test_dimensions(n_atoms):
    sp = HilbertSpace(n_fock=5, n_atoms=n_atoms)
    assert sp.fock_dim == 6
    assert sp.emitter_dim == 3**n_atoms
    assert sp.dim == 6 * 3**n_atoms
    assert sp.factor_dims == (6,) + (3,) * n_atoms


def test_index_convention():
    sp = HilbertSpace(4, 2)
    assert sp.index(0, "s", "s") == 0
    assert sp.index(0, "s", "g") == 1
    assert sp.index(0, "g", "s") == 3
    assert sp.index(2, "e", "e") == 2 * 9 + 8
    labels = sp.labels()
    assert labels[sp.index(3, "g", "e")] == (3, ("g", "e"))


def test_commutator_defect_only_at_cutoff():
    sp = HilbertSpace(8)
    a = make_destroy(sp)
    comm = (a @ a.dag() - a.dag() @ a).data
    defect = comm - np.eye(sp.dim)
    for i, (n, _) in enumerate(sp.labels()):
        expected = -(sp.n_fock + 1) if n == sp.n_fock else 0.0
        assert defect[i, i] == pytest.approx(expected)
    assert np.allclose(defect - np.diag(np.diag(defect)), 0)


def test_number_operator():
    sp = HilbertSpace(6)
    a = make_destroy(sp)
    assert np.allclose(make_number(sp).data, (a.dag() @ a).data)


@pytest.mark.parametrize("n_atoms", [1, 2])
def test_projector_completeness(n_atoms):
    sp = HilbertSpace(3, n_atoms)
    for atom in range(n_atoms):
        ops = [make_transition(sp, x, x, atom) for x in "sge"]
        total = ops[0] + ops[1] + ops[2]
        assert np.allclose(total.data, np.eye(sp.dim))
        assert all(p.is_hermitian() for p in ops)


def test_transition_algebra():
    sp = HilbertSpace(2, 2)
    for atom in (0, 1):
        eg = make_transition(sp, "e", "g", atom)
        gs = make_transition(sp, "g", "s", atom)
        es = make_transition(sp, "e", "s", atom)
        assert np.allclose((eg @ gs).data, es.data)
        assert np.allclose((gs @ eg).data, 0)
    # different atoms commute
    a0 = make_transition(sp, "e", "g", 0)
    a1 = make_transition(sp, "g", "s", 1)
    assert np.allclose((a0 @ a1 - a1 @ a0).data, 0)


def test_tensor_embed_round_trip():
    sp = HilbertSpace(3, 2)
    m = np.arange(9.0).reshape(3, 3)
    emb = tensor_embed(m, sp, 1)
    v = sp.basis_vector(2, "s", "g")
    w = emb.data @ v
    # acting on atom 1 only: column "g" of m lands on levels of atom 1
    for lvl, k in zip("sge", range(3)):
        assert w[sp.index(2, "s", lvl)] == pytest.approx(m[k, 1])
    assert np.allclose(tensor_embed(np.eye(4), sp, "fock").data, np.eye(sp.dim))


def test_operator_is_immutable():
    sp = HilbertSpace(2)
    op = identity(sp)
    with pytest.raises(ValueError):
        op.data[0, 0] = 2.0
    with pytest.raises(AttributeError):
        op.data = np.zeros((sp.dim, sp.dim))


def test_mixed_spaces_rejected():
    a = make_destroy(HilbertSpace(2))
    b = make_destroy(HilbertSpace(3))
    with pytest.raises(ValueError):
        a + b
    with pytest.raises(ValueError):
        a @ b


def test_invalid_arguments():
    with pytest.raises(ValueError):
        HilbertSpace(0)
    sp = HilbertSpace(2)
    with pytest.raises((ValueError, KeyError)):
        sp.index(0, "x")
    with pytest.raises((ValueError, IndexError)):
        sp.index(3, "s")
    with pytest.raises((ValueError, IndexError)):
        make_transition(sp, "e", "g", atom_index=1)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.floats(-3, 3), st.floats(-3, 3))
def test_linear_combination_adjoint(n, x, y):
    sp = HilbertSpace(n)
    a = make_destroy(sp)
    op = a * x + a.dag() * y
    assert np.allclose(op.dag().data, (a.dag() * x + a * y).data)
    herm = a + a.dag()
    assert herm.is_hermitian()
    assert herm.trace() == pytest.approx(0)

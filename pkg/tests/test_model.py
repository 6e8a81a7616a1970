import numpy as np
import pytest
from scipy.integrate import quad

from uscqed.hilbert import HilbertSpace, make_destroy, make_transition
from uscqed.model import (ModelParams, PulseParams, build_hamiltonian, build_pulse_operator,
                          build_rwa_hamiltonian, excitation_number, gaussian_envelope,
                          parity_operator, pulse_envelope)

from conftest import brute_hamiltonian


def test_defaults_and_derived():
    p = ModelParams.zero_detuning(0.3)
    assert (p.omega_s, p.omega_g, p.omega_e) == (0.0, 3.5, 4.5)
    assert p.omega_gs == 3.5
    assert p.detuning == 0.0


@pytest.mark.parametrize("kw", [dict(omega_g=5.0), dict(omega_r=-0.1), dict(omega0=0.0)])
def test_invalid_params(kw):
    with pytest.raises(ValueError):
        ModelParams(**kw)


def test_uncoupled_ladder():
    sp = HilbertSpace(5)
    H = build_hamiltonian(ModelParams(), sp)
    expected = [n + {"s": 0.0, "g": 3.5, "e": 4.5}[lv[0]] for n, lv in sp.labels()]
    assert np.allclose(H.data, np.diag(expected))


@pytest.mark.parametrize("w", [0.0, 0.3, 0.65, 1.0])
def test_matches_independent_construction(w):
    H = build_hamiltonian(ModelParams.zero_detuning(w), HilbertSpace(7))
    assert H.is_hermitian(1e-12)
    assert np.allclose(H.data, brute_hamiltonian(w, 7), atol=1e-12)


def test_two_atoms_hermitian_and_symmetric():
    sp = HilbertSpace(4, 2)
    H = build_hamiltonian(ModelParams.zero_detuning(0.5), sp)
    assert H.is_hermitian()
    # swapping the two atoms leaves H invariant
    perm = [sp.index(n, b, a) for n, (a, b) in sp.labels()]
    assert np.allclose(H.data[np.ix_(perm, perm)], H.data)


def test_rwa_conserves_excitations():
    sp = HilbertSpace(10)
    p = ModelParams.zero_detuning(0.4)
    Hr = build_rwa_hamiltonian(p, sp)
    N = excitation_number(sp)
    assert np.allclose((N @ Hr - Hr @ N).data, 0, atol=1e-12)
    # the full Hamiltonian does not
    H = build_hamiltonian(p, sp)
    assert not np.allclose((N @ H - H @ N).data, 0)


def test_rwa_ground_of_interacting_sector_is_bare():
    sp = HilbertSpace(10)
    for w in (0.1, 0.6):
        Hr = build_rwa_hamiltonian(ModelParams.zero_detuning(w), sp).data
        idx = [i for i, (_, lv) in enumerate(sp.labels()) if lv[0] != "s"]
        e = np.linalg.eigvalsh(Hr[np.ix_(idx, idx)])
        assert e[0] == pytest.approx(3.5, abs=1e-12)


@pytest.mark.parametrize("n_atoms", [1, 2])
def test_parity_commutes(n_atoms):
    sp = HilbertSpace(6, n_atoms)
    H = build_hamiltonian(ModelParams.zero_detuning(0.8), sp)
    P = parity_operator(sp)
    assert np.allclose((P @ P).data, np.eye(sp.dim))
    assert np.allclose((P @ H - H @ P).data, 0, atol=1e-12)


def test_s_population_is_conserved():
    sp = HilbertSpace(6, 2)
    H = build_hamiltonian(ModelParams.zero_detuning(0.8), sp)
    for atom in (0, 1):
        Ps = make_transition(sp, "s", "s", atom)
        assert np.allclose((Ps @ H - H @ Ps).data, 0)


@pytest.mark.parametrize("sigma", [0.5, 1.7, 5.0])
def test_envelope_area(sigma):
    pulse = PulseParams(sigma=sigma)
    area, _ = quad(lambda t: float(gaussian_envelope(t, pulse)), -np.inf, np.inf)
    assert area == pytest.approx(np.pi, rel=1e-9)
    scaled = PulseParams(sigma=sigma, amplitude_scale=0.5)
    assert quad(lambda t: float(gaussian_envelope(t, scaled)), -np.inf, np.inf)[0] == pytest.approx(np.pi / 2)


def test_pulse_envelope_carrier():
    pulse = PulseParams(sigma=2.0, omega_drive=3.3)
    t = np.linspace(-5, 5, 11)
    assert np.allclose(pulse_envelope(t, pulse), gaussian_envelope(t, pulse) * np.cos(3.3 * t))
    with pytest.raises(ValueError):
        pulse_envelope(0.0, PulseParams(sigma=1.0))
    with pytest.raises(ValueError):
        PulseParams(sigma=0.0)


def test_pulse_operator():
    sp = HilbertSpace(2, 2)
    op = build_pulse_operator(sp)
    assert op.is_hermitian()
    v = sp.basis_vector(1, "s", "s")
    w = op.data @ v
    assert w[sp.index(1, "g", "s")] == 1 and w[sp.index(1, "s", "g")] == 1
    assert np.sum(np.abs(w)) == 2
    assert make_destroy(sp).data.shape == op.data.shape

import numpy as np
import pytest

from uscqed.dissipation import build_dissipators
from uscqed.dressed import diagonalize
from uscqed.dynamics import (InvariantError, StepSizeError, evolve, evolve_driven, initial_state,
                             stability_bound)
from uscqed.hilbert import HilbertSpace
from uscqed.model import ModelParams, PulseParams, build_hamiltonian
from uscqed.system import System

from conftest import RATES


def test_closed_eigenstate_is_constant():
    s = System(ModelParams.zero_detuning(0.6), {}, n_fock=8)
    rho0 = s.initial_state()
    tr = evolve(rho0, s.H, s.dissipators, 5.0, 0.01, store_every=100)
    assert np.allclose(tr.state(-1), rho0, atol=1e-12)
    assert tr.max_trace_error < 1e-12


def test_closed_superposition_phase():
    s = System(ModelParams.zero_detuning(0.6), {}, n_fock=8)
    b = s.basis
    j = b.dressed_ground_index
    v = (b.vectors[:, 0] + b.vectors[:, j]) / np.sqrt(2)
    t_end = 2.0
    tr = evolve(np.outer(v, v.conj()), s.H, s.dissipators, t_end, 0.005, store_every=400)
    rd = b.to_dressed(tr.state(-1))
    w = b.energies[j] - b.energies[0]
    assert rd[0, j] == pytest.approx(0.5 * np.exp(1j * w * t_end), abs=1e-7)


def test_zero_amplitude_drive_equals_free_evolution(small_system):
    s = small_system
    free = evolve(s.initial_state("bare"), s.H, s.dissipators, 4.0, 0.01, t_start=-4.0,
                  observables=s.recorded_operators(), store_every=None)
    pulse = PulseParams(sigma=1.0, amplitude_scale=0.0)
    driven = s.evolve_driven(pulse, -4.0, 4.0, 0.01)
    for k in ("n_phys", "P_s0"):
        assert np.allclose(free[k], driven[k], atol=1e-14)


def test_pi_pulse_inverts_uncoupled_emitter():
    s = System(ModelParams(), {}, n_fock=4)
    pulse = PulseParams(sigma=5.0)
    tr = s.evolve_driven(pulse, -30.0, 30.0, 0.005)
    assert tr["P_dressed_ground"][-1] == pytest.approx(1.0, abs=5e-3)
    assert tr["P_s0"][-1] < 5e-3


def test_step_size_guard(small_system):
    s = small_system
    bound = stability_bound(s.H, s.dissipators)
    with pytest.raises(StepSizeError):
        evolve(s.initial_state(), s.H, s.dissipators, 10 * bound, 5 * bound)


def test_time_grid_errors(small_system):
    s = small_system
    with pytest.raises(ValueError):
        evolve(s.initial_state(), s.H, s.dissipators, 1.0, 0.3)
    with pytest.raises(ValueError):
        s.evolve_driven(PulseParams(sigma=2.0), -5.0, 5.0, 0.01)


def test_unphysical_state_breaches_positivity(small_system):
    s = small_system
    rho = np.zeros((s.space.dim, s.space.dim))
    rho[0, 0], rho[1, 1] = 1.5, -0.5
    with pytest.raises(InvariantError, match="positivity"):
        evolve(rho, s.H, s.dissipators, 0.1, 0.01)
    tr = evolve(rho, s.H, s.dissipators, 0.1, 0.01, raise_on_breach=False)
    assert tr.min_eigenvalue < -0.4


def test_initial_states(small_system):
    b = small_system.basis
    rho = initial_state("bare", b, (1, "g"))
    assert rho[b.space.index(1, "g"), b.space.index(1, "g")] == 1
    m = np.diag(np.arange(1.0, b.dim + 1))
    assert np.trace(initial_state("custom", b, m)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        initial_state("thermal", b)


def test_relaxes_to_true_vacuum():
    s = System(ModelParams.zero_detuning(0.6), RATES, n_fock=8)
    tr = s.evolve(600.0, 0.01)
    assert tr["P_s0"][-1] > 0.999
    assert tr.max_trace_error < 1e-9
    assert tr.min_eigenvalue > -1e-9
    # the dressed vacuum empties with rate Gamma at t = 0
    gamma = s.dissipators.decay_rates()[s.basis.dressed_ground_index]
    p = tr["P_dressed_ground"]
    assert (p[1] - p[0]) / 0.01 == pytest.approx(-gamma, rel=1e-3)


def test_two_atom_trace_preserved():
    space = HilbertSpace(4, 2)
    H = build_hamiltonian(ModelParams.zero_detuning(0.65), space)
    dset = build_dissipators(diagonalize(H), RATES)
    tr = evolve(initial_state("dressed_ground", dset.basis), H, dset, 5.0, 0.01)
    assert tr.max_trace_error < 1e-10

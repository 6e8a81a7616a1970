import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uscqed.dressed import diagonalize
from uscqed.hilbert import HilbertSpace
from uscqed.model import ModelParams, build_hamiltonian
from uscqed.observables import (ObservableSet, big_g2, expect, g2, g3, mean_physical_photons,
                                output_flux, population, resolve_state, statistics_from_moments)

from conftest import random_density


@pytest.fixture(scope="module")
def uncoupled():
    b = diagonalize(build_hamiltonian(ModelParams(), HilbertSpace(30)))
    return b, ObservableSet.from_basis(b, gamma0=0.02)


def _ket_rho(b, n, level="s"):
    v = b.space.basis_vector(n, level)
    return np.outer(v, v)


def test_fock_one(uncoupled):
    b, obs = uncoupled
    rho = _ket_rho(b, 1)
    assert mean_physical_photons(rho, obs) == pytest.approx(1.0)
    assert g2(rho, obs) == pytest.approx(0.0, abs=1e-14)
    assert big_g2(rho, obs) == pytest.approx(0.0, abs=1e-14)
    assert output_flux(rho, obs) == pytest.approx(0.02)


def test_fock_two(uncoupled):
    b, obs = uncoupled
    rho = _ket_rho(b, 2)
    assert g2(rho, obs) == pytest.approx(0.5)
    assert big_g2(rho, obs) == pytest.approx(1.0)
    # no emitter excitation: three-photon-plus-emitter correlation is undefined
    assert math.isnan(g3(rho, obs))


def test_vacuum_is_undefined_or_zero(uncoupled):
    b, obs = uncoupled
    rho = _ket_rho(b, 0)
    assert math.isnan(g2(rho, obs))
    assert big_g2(rho, obs) == 0.0


@settings(max_examples=15, deadline=None)
@given(st.floats(0.3, 2.0))
def test_coherent_state_is_poissonian(alpha):
    b = diagonalize(build_hamiltonian(ModelParams(), HilbertSpace(40)))
    obs = ObservableSet.from_basis(b)
    n = np.arange(41)
    amp = np.exp(-alpha**2 / 2) * alpha**n / np.sqrt(np.array([math.factorial(k) for k in n], dtype=float))
    v = np.zeros(b.dim)
    v[[b.space.index(k, "s") for k in n]] = amp
    rho = np.outer(v, v)
    assert mean_physical_photons(rho, obs) == pytest.approx(alpha**2, rel=1e-8)
    assert g2(rho, obs) == pytest.approx(1.0, rel=1e-8)


def test_g3_on_excited_emitter(uncoupled):
    b, obs = uncoupled
    # |g, 3>: sigma+ takes it to |s, 3>, then X+^2 leaves one photon
    rho = _ket_rho(b, 3, "g")
    assert g3(rho, obs) == pytest.approx(6.0 / 9.0)


def test_vectorized_statistics_match(small_system, rng):
    obs = small_system.obs
    ops = obs.operators()
    states = [random_density(rng, small_system.space.dim) for _ in range(4)]
    moments = {k: np.array([np.real(expect(op, r)) for r in states]) for k, op in ops.items()}
    out = statistics_from_moments(moments)
    for i, r in enumerate(states):
        assert out["g2"][i] == pytest.approx(g2(r, obs))
        assert out["G2"][i] == pytest.approx(big_g2(r, obs))
        assert out["g3"][i] == pytest.approx(g3(r, obs))


def test_dressed_vacuum_is_dark(small_system):
    rho = small_system.initial_state()
    assert mean_physical_photons(rho, small_system.obs) == pytest.approx(0.0, abs=1e-14)


def test_state_specs(small_system):
    b = small_system.basis
    rho = small_system.initial_state()
    assert population(rho, "dressed_ground", b) == pytest.approx(1.0)
    assert population(rho, "s0", b) == pytest.approx(0.0)
    assert population(rho, b.dressed_ground_index, b) == pytest.approx(1.0)
    assert np.allclose(resolve_state((2, "s"), b), b.space.basis_vector(2, "s"))
    assert np.allclose(np.abs(resolve_state("global_ground", b)), np.abs(b.space.basis_vector(0, "s")))
    for bad in ("nowhere", 10_000, (1, "s", "g")):
        with pytest.raises(ValueError):
            resolve_state(bad, b)

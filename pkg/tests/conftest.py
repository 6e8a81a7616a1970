import numpy as np
import pytest

from uscqed.model import ModelParams
from uscqed.system import System

RATES = {"cavity": 0.02, "eg": 0.02, "gs": 0.02}


def bare_ops(n_fock, n_levels=3):
    """Independent kron-built a, |alpha><beta| for one emitter (index = n*3 + level)."""
    a = np.diag(np.sqrt(np.arange(1, n_fock + 1)), 1)
    If = np.eye(n_fock + 1)
    Ie = np.eye(n_levels)

    def ket(k):
        v = np.zeros(n_levels)
        v[k] = 1.0
        return v

    def trans(i, j):
        return np.kron(If, np.outer(ket(i), ket(j)))

    return np.kron(a, Ie), trans


def brute_hamiltonian(omega_r, n_fock, w_g=3.5, w_e=4.5):
    A, trans = bare_ops(n_fock)
    H = A.T @ A + w_g * trans(1, 1) + w_e * trans(2, 2)
    X = A + A.T
    H = H + omega_r * X @ (trans(2, 1) + trans(1, 2))
    return H


@pytest.fixture(scope="session")
def small_system():
    return System(ModelParams.zero_detuning(0.6), RATES, n_fock=8)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_density(rng, n, rank=None):
    rank = rank or n
    m = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


ACCEPTANCE_LINES: dict[int, str] = {}


def report(number: int, ok: bool, detail: str) -> bool:
    """Record and print one acceptance verdict line."""
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} | {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])

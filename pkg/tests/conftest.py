import math

import numpy as np
import pytest


def kron_step_operator(thetas, boundary="periodic"):
    """Dense S (sum_x |x><x| (x) C(theta_x)) built from projectors and kron products.

    Basis order is coin (x) position, matching WalkState.vector().
    """
    thetas = np.asarray(thetas, dtype=float)
    L = thetas.size
    up = np.array([[1, 0], [0, 0]], dtype=complex)
    down = np.array([[0, 0], [0, 1]], dtype=complex)
    to_left = np.zeros((L, L), dtype=complex)
    to_right = np.zeros((L, L), dtype=complex)
    for i in range(L):
        if boundary == "periodic" or i - 1 >= 0:
            to_left[(i - 1) % L, i] = 1
        if boundary == "periodic" or i + 1 < L:
            to_right[(i + 1) % L, i] = 1
    S = np.kron(up, to_left) + np.kron(down, to_right)
    C = np.zeros((2 * L, 2 * L), dtype=complex)
    for i, th in enumerate(thetas):
        coin = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
        site = np.zeros((L, L))
        site[i, i] = 1
        C += np.kron(coin, site)
    return S @ C


def kspace_quasi_energies(step_thetas, N):
    """Quasi-energies of a product of homogeneous steps, one 2x2 block per momentum."""
    L = 2 * N + 1
    k = 2 * math.pi * np.arange(L) / L
    U = np.broadcast_to(np.eye(2, dtype=complex), (L, 2, 2)).copy()
    # |k> with <x|k> = e^{ikx}: the up shift x -> x-1 multiplies by e^{-ik}
    phase = np.zeros((L, 2, 2), dtype=complex)
    phase[:, 0, 0] = np.exp(-1j * k)
    phase[:, 1, 1] = np.exp(1j * k)
    for th in step_thetas:
        coin = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
        U = phase @ coin @ U
    lam = np.linalg.eigvals(U).ravel()
    return np.sort(-np.angle(lam))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# criterion number -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

import numpy as np
import pytest

import coupledwells as cw


@pytest.fixture(scope="session")
def be9():
    return cw.BERYLLIUM_9


@pytest.fixture(scope="session")
def trap_404():
    """Operating point of the few-quanta exchange runs: 40 um wells at 4.04 MHz."""
    return cw.TrapConfig(separation_s0=40e-6, height_d0=40e-6,
                         freq_a=4.04e6, freq_b=4.04e6, shielding_enabled=True)


@pytest.fixture(scope="session")
def trap_556():
    """Operating point of the single-quantum runs: 5.56 MHz wells."""
    return cw.TrapConfig(separation_s0=40e-6, height_d0=40e-6,
                         freq_a=5.56e6, freq_b=5.56e6, shielding_enabled=True)


@pytest.fixture(scope="session")
def dense_liouvillian():
    """Independent dense-matrix Liouvillian, the oracle for the engine."""

    def build(space, hamiltonian, heating, rho_matrix):
        a = cw.mode_operator(space, cw.destroy(space.dim_a), "a")
        b = cw.mode_operator(space, cw.destroy(space.dim_b), "b")
        h = hamiltonian.matrix(space)
        out = -1j * (h @ rho_matrix - rho_matrix @ h)
        jumps = [(a, heating.ndot_a), (a.conj().T, heating.ndot_a),
                 (b, heating.ndot_b), (b.conj().T, heating.ndot_b)]
        for op, rate in jumps:
            if rate:
                opd_op = op.conj().T @ op
                out += rate * (op @ rho_matrix @ op.conj().T
                               - 0.5 * (opd_op @ rho_matrix + rho_matrix @ opd_op))
        return out

    return build


@pytest.fixture
def rng():
    return np.random.default_rng(20110223)


def random_density(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = m @ m.conj().T
    return m / np.trace(m).real

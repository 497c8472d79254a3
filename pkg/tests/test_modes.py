import math

import numpy as np
import pytest

import coupledwells as cw
from coupledwells.errors import InstabilityError, PhysicsDomainError

TWO_PI = 2.0 * math.pi


def test_minimum_splitting_on_resonance(be9, trap_404):
    spectrum = cw.normal_mode_frequencies(trap_404, be9, be9)
    assert spectrum.splitting == pytest.approx(3.1e3, rel=0.02)
    omega = cw.exchange_rate(trap_404, be9, be9)
    assert spectrum.splitting == pytest.approx(omega / math.pi, rel=5e-3)


def test_uncoupled_wells_recover_bare_frequencies(be9):
    spectrum = cw.mode_frequencies(4.2e6, 3.9e6, be9.mass, be9.mass, kappa=0.0)
    assert spectrum.f_minus == pytest.approx(3.9e6, rel=1e-14)
    assert spectrum.f_plus == pytest.approx(4.2e6, rel=1e-14)


def test_large_detuning_splitting_approaches_detuning(be9):
    detuning = 100e3
    config = cw.TrapConfig(40e-6, 40e-6, 4.04e6 + detuning, 4.04e6)
    spectrum = cw.normal_mode_frequencies(config, be9, be9)
    assert spectrum.splitting == pytest.approx(detuning, rel=1e-3)


@pytest.mark.parametrize("freq_a,freq_b,mass_b_factor,s0_um", [
    (4.04e6, 4.04e6, 1.0, 40.0),
    (4.3e6, 3.8e6, 1.0, 40.0),
    (5.0e6, 5.0e6, 2.77, 25.0),
    (2.2e6, 6.0e6, 0.4, 60.0),
])
def test_eigensolver_cross_check(be9, freq_a, freq_b, mass_b_factor, s0_um):
    # independent route: eigvalsh of the mass-weighted dynamical matrix
    mass_a = be9.mass
    mass_b = mass_b_factor * be9.mass
    kappa = cw.coulomb_coupling_constant(be9, be9, s0_um * 1e-6)
    dyn = np.array([
        [(TWO_PI * freq_a) ** 2, -kappa / math.sqrt(mass_a * mass_b)],
        [-kappa / math.sqrt(mass_a * mass_b), (TWO_PI * freq_b) ** 2]])
    low, high = np.sqrt(np.linalg.eigvalsh(dyn)) / TWO_PI
    spectrum = cw.mode_frequencies(freq_a, freq_b, mass_a, mass_b, kappa)
    assert spectrum.f_minus == pytest.approx(low, rel=1e-12)
    assert spectrum.f_plus == pytest.approx(high, rel=1e-12)


def test_sweep_minimum_at_zero_detuning(be9, trap_404):
    sweep = cw.avoided_crossing_sweep(trap_404, be9, be9, -20e3, 20e3, 81)
    splittings = sweep.splittings
    idx = int(np.argmin(splittings))
    assert sweep.detunings[idx] == pytest.approx(0.0, abs=1e-9)
    omega = cw.exchange_rate(trap_404, be9, be9)
    assert splittings[idx] == pytest.approx(omega / math.pi, rel=5e-3)
    # every splitting stays above the resonant minimum
    assert np.all(splittings >= splittings[idx] - 1e-9)


def test_splitting_symmetric_under_frequency_swap(be9):
    # exchanging the two well frequencies leaves the spectrum unchanged
    for det in (2e3, 7e3, 15e3):
        one = cw.mode_frequencies(4.04e6 + det, 4.04e6, be9.mass, be9.mass, 7.2e-15)
        other = cw.mode_frequencies(4.04e6, 4.04e6 + det, be9.mass, be9.mass, 7.2e-15)
        assert one.splitting == pytest.approx(other.splitting, rel=1e-12)


def test_sweep_splitting_even_in_detuning(be9, trap_404):
    # around a fixed freq_b the evenness is only approximate, at O(det/f0)
    sweep = cw.avoided_crossing_sweep(trap_404, be9, be9, -15e3, 15e3, 31)
    splittings = sweep.splittings
    assert np.allclose(splittings, splittings[::-1], rtol=1e-3, atol=0)


def test_sweep_branches_monotonic(be9, trap_404):
    sweep = cw.avoided_crossing_sweep(trap_404, be9, be9, -20e3, 20e3, 41)
    f_minus = np.array([s.f_minus for s in sweep.spectra])
    f_plus = np.array([s.f_plus for s in sweep.spectra])
    assert np.all(np.diff(f_minus) > 0)
    assert np.all(np.diff(f_plus) > 0)


def test_zero_width_sweep_is_single_point(be9, trap_404):
    sweep = cw.avoided_crossing_sweep(trap_404, be9, be9, 0.0, 0.0, 5)
    assert len(sweep.detunings) == 1
    single = cw.normal_mode_frequencies(trap_404, be9, be9)
    assert sweep.spectra[0] == single


def test_instability_raises(be9):
    tight = cw.TrapConfig(0.1e-6, 40e-6, 4.04e6, 4.04e6)
    with pytest.raises(InstabilityError):
        cw.normal_mode_frequencies(tight, be9, be9)


def test_sweep_argument_validation(be9, trap_404):
    with pytest.raises(PhysicsDomainError):
        cw.avoided_crossing_sweep(trap_404, be9, be9, -1e3, 1e3, 1)
    with pytest.raises(PhysicsDomainError):
        cw.avoided_crossing_sweep(trap_404, be9, be9, 5e3, -5e3, 11)

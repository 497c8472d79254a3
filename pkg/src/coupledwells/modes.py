"""Classical normal-mode analysis of the two coupled wells.

The linearized equations of motion

    m_a x_a'' = -m_a w_a^2 x_a + kappa x_b
    m_b x_b'' = -m_b w_b^2 x_b + kappa x_a

yield two normal modes whose splitting shows an avoided crossing as one
well is tuned through resonance with the other.
"""
import math
from dataclasses import dataclass

import numpy as np

from .constants import IonSpecies
from .coupling import TrapConfig, coulomb_coupling_constant, shielding_factor
from .errors import InstabilityError, PhysicsDomainError

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ModeSpectrum:
    """The two axial normal-mode frequencies, in Hz."""

    f_minus: float
    f_plus: float

    @property
    def splitting(self) -> float:
        return self.f_plus - self.f_minus


@dataclass(frozen=True)
class CrossingSweep:
    """Mode spectra along a detuning scan (detuning = freq_a - freq_b, Hz)."""

    detunings: np.ndarray
    spectra: list

    def __post_init__(self):
        if len(self.detunings) != len(self.spectra):
            raise ValueError("detunings and spectra must have equal length")
        if len(self.detunings) > 1 and not np.all(np.diff(self.detunings) > 0):
            raise ValueError("detunings must be strictly increasing")

    @property
    def splittings(self) -> np.ndarray:
        return np.array([s.splitting for s in self.spectra])


def mode_frequencies(freq_a: float, freq_b: float, mass_a: float,
                     mass_b: float, kappa: float) -> ModeSpectrum:
    """Normal-mode frequencies (Hz) for given well frequencies and coupling.

    Eigenvalues of the mass-weighted dynamical matrix:
        w_pm^2 = (w_a^2 + w_b^2)/2 +- sqrt(((w_a^2 - w_b^2)/2)^2 + kappa^2/(m_a m_b))
    Raises InstabilityError when kappa^2/(m_a m_b) >= w_a^2 w_b^2 (the lower
    mode loses confinement).
    """
    wa2 = (_TWO_PI * freq_a) ** 2
    wb2 = (_TWO_PI * freq_b) ** 2
    cross = kappa * kappa / (mass_a * mass_b)
    if cross >= wa2 * wb2:
        raise InstabilityError(
            "coupling exceeds the well confinement (barrier collapse): "
            f"kappa^2/(m_a*m_b)={cross:.3e} >= wa^2*wb^2={wa2 * wb2:.3e}")
    mean = 0.5 * (wa2 + wb2)
    shift = math.sqrt((0.5 * (wa2 - wb2)) ** 2 + cross)
    return ModeSpectrum(f_minus=math.sqrt(mean - shift) / _TWO_PI,
                        f_plus=math.sqrt(mean + shift) / _TWO_PI)


def normal_mode_frequencies(config: TrapConfig, species_a: IonSpecies,
                            species_b: IonSpecies) -> ModeSpectrum:
    """Normal modes of a configured trap; kappa includes shielding if enabled."""
    kappa = coulomb_coupling_constant(species_a, species_b, config.separation_s0)
    if config.shielding_enabled:
        kappa *= shielding_factor(config.separation_s0, config.height_d0)
    return mode_frequencies(config.freq_a, config.freq_b,
                            species_a.mass, species_b.mass, kappa)


def avoided_crossing_sweep(base: TrapConfig, species_a: IonSpecies,
                           species_b: IonSpecies, detuning_min: float,
                           detuning_max: float, steps: int) -> CrossingSweep:
    """Sweep freq_a across [freq_b + detuning_min, freq_b + detuning_max].

    freq_b is held fixed; detunings are in Hz.  steps >= 2 unless the range
    has zero width, in which case a single point is returned.
    """
    if detuning_max < detuning_min:
        raise PhysicsDomainError("detuning_max must be >= detuning_min")
    if detuning_min == detuning_max:
        detunings = np.array([detuning_min])
    else:
        if steps < 2:
            raise PhysicsDomainError(f"steps must be >= 2, got {steps}")
        detunings = np.linspace(detuning_min, detuning_max, steps)
    spectra = []
    for det in detunings:
        config = TrapConfig(separation_s0=base.separation_s0,
                            height_d0=base.height_d0,
                            freq_a=base.freq_b + det,
                            freq_b=base.freq_b,
                            shielding_enabled=base.shielding_enabled)
        spectra.append(normal_mode_frequencies(config, species_a, species_b))
    return CrossingSweep(detunings=detunings, spectra=spectra)

"""Closed-form coupling physics for two ions in separate potential wells.

Expanding the Coulomb energy of two ions about their equilibrium positions
gives, at lowest order, a bilinear term -kappa * x_a * x_b plus per-well
curvature shifts.  These functions evaluate the resulting exchange rate,
the electrode shielding correction, and the static frequency shift.

Frequencies are accepted and reported in Hz at every public boundary;
angular frequencies (rad/s) appear only inside the formulas.
"""
import math
from dataclasses import dataclass

from .constants import VACUUM_PERMITTIVITY, IonSpecies
from .errors import PhysicsDomainError

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TrapConfig:
    """Geometry and secular frequencies of the double-well trap.

    separation_s0 : m, distance between the two potential minima
    height_d0 : m, height of the minima above the electrode plane
    freq_a, freq_b : Hz, axial secular frequency of each well
    shielding_enabled : apply the grounded-electrode image correction
    """

    separation_s0: float
    height_d0: float
    freq_a: float
    freq_b: float
    shielding_enabled: bool = True

    def __post_init__(self):
        for field in ("separation_s0", "height_d0", "freq_a", "freq_b"):
            value = getattr(self, field)
            if not value > 0:
                raise PhysicsDomainError(f"{field} must be positive, got {value}")


@dataclass(frozen=True)
class CouplingParams:
    """Derived coupling quantities for a configured ion pair.

    kappa : N/m, coefficient of -x_a*x_b in the interaction energy (bare,
        no shielding)
    omega_ex : rad/s, exchange rate (includes shielding if enabled)
    beta : dimensionless shielding factor
    tau_ex : s, full energy-swap time pi/(2*omega_ex)
    """

    kappa: float
    omega_ex: float
    beta: float
    tau_ex: float


def coulomb_coupling_constant(species_a: IonSpecies, species_b: IonSpecies,
                              s0: float) -> float:
    """Bilinear coupling coefficient kappa = q_a*q_b / (2*pi*eps0*s0^3) in N/m."""
    if not s0 > 0:
        raise PhysicsDomainError(f"separation must be positive, got {s0}")
    return species_a.charge * species_b.charge / (_TWO_PI * VACUUM_PERMITTIVITY * s0**3)


def shielding_factor(s0: float, d0: float) -> float:
    """Image-charge shielding factor for a grounded plane below the ions.

    With r = s0/d0:
        beta = 1 - (3*r^5/(4+r^2)^(5/2) - r^3/(4+r^2)^(3/2)) / 2
    beta -> 1 for r -> 0 (plane far away) and -> 0 for r -> infinity.
    """
    if not s0 > 0 or not d0 > 0:
        raise PhysicsDomainError("separation and height must be positive")
    r = s0 / d0
    base = 4.0 + r * r
    return 1.0 - 0.5 * (3.0 * r**5 / base**2.5 - r**3 / base**1.5)


def exchange_rate(config: TrapConfig, species_a: IonSpecies,
                  species_b: IonSpecies) -> float:
    """Motional exchange rate in rad/s.

    omega_ex = |q_a*q_b| / (4*pi*eps0*s0^3*sqrt(m_a*m_b)*sqrt(w_a*w_b))
    with w_i the angular secular frequencies.  Multiplied by the shielding
    factor when config.shielding_enabled.
    """
    s0 = config.separation_s0
    omega_a = _TWO_PI * config.freq_a
    omega_b = _TWO_PI * config.freq_b
    rate = abs(species_a.charge * species_b.charge) / (
        2.0 * _TWO_PI * VACUUM_PERMITTIVITY * s0**3
        * math.sqrt(species_a.mass * species_b.mass)
        * math.sqrt(omega_a * omega_b))
    if config.shielding_enabled:
        rate *= shielding_factor(s0, config.height_d0)
    return rate


def exchange_time(omega_ex: float) -> float:
    """Time for a full energy swap: tau_ex = pi / (2*omega_ex)."""
    if not omega_ex > 0:
        raise PhysicsDomainError(f"exchange rate must be positive, got {omega_ex}")
    return math.pi / (2.0 * omega_ex)


def static_frequency_shift(config: TrapConfig, species: IonSpecies,
                           well: str = "a",
                           partner: IonSpecies | None = None) -> float:
    """Secular-frequency shift (Hz) from the quadratic Coulomb terms.

    The x_i^2 terms of the expansion add kappa to the well curvature, so the
    observed frequency becomes sqrt(w0^2 + kappa/m)/(2*pi).  Returned is the
    difference to the bare well frequency; positive for like charges.
    The partner ion defaults to the same species.
    """
    if well not in ("a", "b"):
        raise PhysicsDomainError(f"well must be 'a' or 'b', got {well!r}")
    kappa = coulomb_coupling_constant(species, partner or species,
                                      config.separation_s0)
    omega0 = _TWO_PI * (config.freq_a if well == "a" else config.freq_b)
    shifted_sq = omega0 * omega0 + kappa / species.mass
    if shifted_sq < 0:
        raise PhysicsDomainError("coupling exceeds well curvature; well collapses")
    return (math.sqrt(shifted_sq) - omega0) / _TWO_PI


def coupling_params(config: TrapConfig, species_a: IonSpecies,
                    species_b: IonSpecies) -> CouplingParams:
    """Bundle kappa, omega_ex, beta and tau_ex for a configured pair."""
    kappa = coulomb_coupling_constant(species_a, species_b, config.separation_s0)
    beta = shielding_factor(config.separation_s0, config.height_d0)
    omega_ex = exchange_rate(config, species_a, species_b)
    return CouplingParams(kappa=kappa, omega_ex=omega_ex, beta=beta,
                          tau_ex=exchange_time(omega_ex))

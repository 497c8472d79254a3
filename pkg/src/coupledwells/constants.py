"""Physical constants (CODATA 2018) and ion species definitions.

All values are SI.  The constants are fixed here rather than imported from
scipy so that results are reproducible independent of the scipy version.
"""
from dataclasses import dataclass

from .errors import PhysicsDomainError

VACUUM_PERMITTIVITY = 8.8541878128e-12  # F/m
REDUCED_PLANCK = 1.054571817e-34  # J s
ELEMENTARY_CHARGE = 1.602176634e-19  # C
ATOMIC_MASS_UNIT = 1.66053906660e-27  # kg
ELECTRON_MASS = 9.1093837015e-31  # kg


@dataclass(frozen=True)
class PhysicalConstants:
    """Immutable bundle of the constants the coupling formulas use."""

    vacuum_permittivity: float = VACUUM_PERMITTIVITY
    reduced_planck: float = REDUCED_PLANCK
    elementary_charge: float = ELEMENTARY_CHARGE
    atomic_mass_unit: float = ATOMIC_MASS_UNIT


CODATA2018 = PhysicalConstants()


@dataclass(frozen=True)
class IonSpecies:
    """A trapped ion, reduced to its mass and net charge.

    mass : kg, > 0
    charge : C, nonzero (signed; sign matters for the static force terms)
    """

    mass: float
    charge: float
    name: str = ""

    def __post_init__(self):
        if not self.mass > 0:
            raise PhysicsDomainError(f"ion mass must be positive, got {self.mass}")
        if self.charge == 0:
            raise PhysicsDomainError("ion charge must be nonzero")


def _singly_ionized(mass_amu, name):
    ion_mass = mass_amu * ATOMIC_MASS_UNIT - ELECTRON_MASS
    return IonSpecies(mass=ion_mass, charge=ELEMENTARY_CHARGE, name=name)


# Atomic masses in u; the ion mass subtracts one electron.
BERYLLIUM_9 = _singly_ionized(9.0121831, "Be9+")
MAGNESIUM_25 = _singly_ionized(24.9858370, "Mg25+")
CALCIUM_40 = _singly_ionized(39.9625909, "Ca40+")

SPECIES_REGISTRY = {
    "be9": BERYLLIUM_9,
    "mg25": MAGNESIUM_25,
    "ca40": CALCIUM_40,
}

"""Exception types shared across the package."""


class PhysicsDomainError(ValueError):
    """A physical parameter is outside its valid domain."""


class InstabilityError(PhysicsDomainError):
    """Coupling exceeds the confinement; the two-well system has no bound modes."""


class TruncationError(RuntimeError):
    """The Fock-space truncation is too small for the requested state or evolution."""


class StepSizeError(RuntimeError):
    """The integrator step size violates its accuracy or stability bounds."""


class ConfigError(ValueError):
    """A scenario configuration file failed to parse or validate."""

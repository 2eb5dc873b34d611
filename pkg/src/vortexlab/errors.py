"""Exception hierarchy shared by every vortexlab module."""


class VortexLabError(Exception):
    """Base class for all vortexlab errors."""


class InvalidState(VortexLabError, ValueError):
    """A state does not satisfy the invariants of its model."""


class EmptySystem(InvalidState):
    pass


class DomainViolation(InvalidState):
    """A point lies outside (or on the boundary of) the model domain."""


class CoincidentVortices(InvalidState):
    pass


class CoincidentRings(InvalidState):
    pass


class PassiveTracerRequiresSpecialPath(VortexLabError, ValueError):
    """A zero-strength vortex was passed to a routine that divides by strength."""


class NonPositiveBase(VortexLabError, ValueError):
    pass


class SingularDenominator(VortexLabError, ValueError):
    pass


class ZeroNu(VortexLabError, ValueError):
    pass


class SingularPoint(VortexLabError, ValueError):
    pass


class BeyondCollapse(VortexLabError, ValueError):
    pass


class WrongArity(VortexLabError, ValueError):
    pass


class MixedSigns(VortexLabError, ValueError):
    pass


class IntegrationError(VortexLabError, RuntimeError):
    """Integration stopped early. ``trajectory`` holds what was computed."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class StepUnderflow(IntegrationError):
    pass


class EventStop(IntegrationError):
    pass


class OrbitEscaped(IntegrationError):
    pass


class SingularApproach(IntegrationError):
    pass


class ConfigError(VortexLabError, ValueError):
    pass


class SchemaError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass


class NearSingularWarning(UserWarning):
    """Two rings are close enough that the thin-core model loses accuracy."""


class ThickCoreWarning(UserWarning):
    pass

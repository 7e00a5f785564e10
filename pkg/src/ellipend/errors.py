"""Exception hierarchy.

Every domain failure raised by this package derives from
:class:`EllipendError`, so callers (and the CLI) can distinguish domain
errors from programming errors with a single ``except`` clause.
"""

from __future__ import annotations


class EllipendError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidParameterError(EllipendError):
    """A parameter value lies outside its documented domain."""


class RegimeUndefinedError(EllipendError):
    """Regime classification needs eps > 0; the smallness scale is undefined."""


class NoRotationError(EllipendError):
    """No uniform rotation exists for the given damping and excitation."""


class NotABranchError(EllipendError):
    """The supplied angle does not satisfy the rotation branch equation."""


class ResonanceError(EllipendError):
    """Harmonic-response denominator too close to zero; formula invalid."""


class IntegrationFailureError(EllipendError):
    """Adaptive integration failed (step-size underflow or non-finite state).

    Carries the last accepted time and state so callers can inspect how
    far the integration got.
    """

    def __init__(self, message: str, tau: float, state: tuple[float, ...]):
        super().__init__(message)
        self.tau = tau
        self.state = state


class NoOrbitError(EllipendError):
    """Shooting iteration failed to locate a periodic rotation."""


class OrbitDivergedError(NoOrbitError):
    """Shooting iterates blew up instead of settling near a fixed point."""


class SingularAmplitudeError(EllipendError):
    """Averaged phase equation evaluated at non-positive amplitude."""


class NoStationaryStateError(EllipendError):
    """Root finding on the averaged field did not converge."""


class DegenerateParametersError(EllipendError):
    """Closed-form stationary expressions are undefined for these parameters."""

"""Physical and dimensionless parameter sets, and the excitation regime map.

The pivot of a pendulum of length ``l`` traces the ellipse
``x = X sin(Omega t)``, ``y = Y cos(Omega t)``.  Four dimensionless numbers
govern the rescaled dynamics:

* ``eps``   -- semiaxis half-difference ratio ``(Y - X) / (2 l)``
* ``mu``    -- semiaxis half-sum ratio ``(Y + X) / (2 l)`` (positive)
* ``omega`` -- frequency ratio ``sqrt(g / l) / Omega``
* ``beta``  -- damping ratio ``c / (m l^2 Omega)``

with new time ``tau = Omega t``.  All formula modules take their inputs
from :class:`DimensionlessParams` so there is a single source of truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

from .errors import InvalidParameterError, RegimeUndefinedError

__all__ = [
    "PhysicalParams",
    "DimensionlessParams",
    "Regime",
    "nondimensionalize",
    "classify_regime",
    "parse_params_text",
    "load_params_file",
]

_PHYSICAL_KEYS = ("m", "l", "c", "g", "X", "Y", "Omega")
_DIMENSIONLESS_KEYS = ("eps", "mu", "omega", "beta")


@dataclass(frozen=True)
class PhysicalParams:
    """SI parameters of the pendulum and its pivot excitation.

    Attributes
    ----------
    m : float
        Concentrated mass (kg).
    l : float
        Distance from pivot to mass (m).
    c : float
        Viscous damping coefficient (N m s).
    g : float
        Gravitational acceleration (m/s^2).
    X, Y : float
        Horizontal and vertical excitation semiaxes (m).
    Omega : float
        Excitation angular frequency (rad/s).
    """

    m: float
    l: float
    c: float
    g: float
    X: float
    Y: float
    Omega: float

    def __post_init__(self):
        if not self.l > 0:
            raise InvalidParameterError(f"pendulum length must be positive, got l={self.l}")
        if not self.m > 0:
            raise InvalidParameterError(f"mass must be positive, got m={self.m}")
        if not self.Omega > 0:
            raise InvalidParameterError(f"excitation frequency must be positive, got Omega={self.Omega}")
        if self.X < 0 or self.Y < 0:
            raise InvalidParameterError(f"semiaxes must be nonnegative, got X={self.X}, Y={self.Y}")


@dataclass(frozen=True)
class DimensionlessParams:
    """The four dimensionless numbers governing the rescaled dynamics."""

    eps: float
    mu: float
    omega: float
    beta: float

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidParameterError(f"mu must be positive, got mu={self.mu}")

    @property
    def w(self) -> float:
        """Gravity-to-ellipticity ratio omega**2 / eps (defined only for eps != 0)."""
        if self.eps == 0.0:
            raise InvalidParameterError("w = omega**2/eps is undefined when eps = 0")
        return self.omega**2 / self.eps

    @property
    def beta_hat(self) -> float:
        """Scaled damping beta / sqrt(eps) (defined only for eps > 0)."""
        if not self.eps > 0:
            raise InvalidParameterError("beta_hat = beta/sqrt(eps) is undefined unless eps > 0")
        return self.beta / math.sqrt(self.eps)

    def with_beta(self, beta: float) -> "DimensionlessParams":
        return replace(self, beta=beta)


class Regime(Enum):
    """Smallness regime of (beta, mu) relative to the ellipticity eps."""

    SMALL_DAMPING_SMALL_MU = "small-damping-small-mu"
    NO_ROTATIONS = "no-rotations"
    SMALL_DAMPING_ORDER_ONE_MU = "small-damping-order-one-mu"
    ORDER_ONE_DAMPING_ORDER_ONE_MU = "order-one-damping-order-one-mu"


def nondimensionalize(p: PhysicalParams) -> DimensionlessParams:
    """Map physical parameters to the four governing dimensionless numbers.

    Raises
    ------
    InvalidParameterError
        If ``Y + X = 0`` (mu would vanish) or ``g < 0``.
    """
    if p.Y + p.X <= 0:
        raise InvalidParameterError("Y + X must be positive (mu > 0 required)")
    if p.g < 0:
        raise InvalidParameterError(f"gravitational acceleration must be nonnegative, got g={p.g}")
    return DimensionlessParams(
        eps=(p.Y - p.X) / (2.0 * p.l),
        mu=(p.Y + p.X) / (2.0 * p.l),
        omega=math.sqrt(p.g / p.l) / p.Omega,
        beta=p.c / (p.m * p.l**2 * p.Omega),
    )


def classify_regime(
    d: DimensionlessParams,
    small_threshold: float = 1.0,
    small_mu_threshold: float = 0.2,
) -> Regime:
    """Classify which asymptotic treatment applies for the given parameters.

    ``beta`` counts as small when ``beta <= small_threshold * sqrt(eps)``;
    ``mu`` counts as small when ``mu <= small_mu_threshold``.  Small damping
    with order-one ``mu`` is the slow-flow averaging regime; order-one
    damping with order-one ``mu`` is the direct expansion regime; order-one
    damping with small ``mu`` admits no rotations at all.

    Raises
    ------
    RegimeUndefinedError
        If ``eps <= 0`` (the sqrt(eps) smallness scale is meaningless).
    InvalidParameterError
        If a threshold is not positive.
    """
    if not small_threshold > 0 or not small_mu_threshold > 0:
        raise InvalidParameterError("regime thresholds must be positive")
    if not d.eps > 0:
        raise RegimeUndefinedError(f"regime classification requires eps > 0, got eps={d.eps}")
    beta_small = d.beta <= small_threshold * math.sqrt(d.eps)
    mu_small = d.mu <= small_mu_threshold
    if beta_small and mu_small:
        return Regime.SMALL_DAMPING_SMALL_MU
    if not beta_small and mu_small:
        return Regime.NO_ROTATIONS
    if beta_small:
        return Regime.SMALL_DAMPING_ORDER_ONE_MU
    return Regime.ORDER_ONE_DAMPING_ORDER_ONE_MU


def parse_params_text(text: str) -> PhysicalParams | DimensionlessParams:
    """Parse flat ``key=value`` parameter text.

    Exactly the physical key set (m, l, c, g, X, Y, Omega) or the
    dimensionless key set (eps, mu, omega, beta) must appear, one pair per
    line.  Blank lines and lines starting with ``#`` are ignored.  Unknown,
    duplicate, or missing keys are rejected.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidParameterError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _PHYSICAL_KEYS and key not in _DIMENSIONLESS_KEYS:
            raise InvalidParameterError(f"line {lineno}: unknown parameter key {key!r}")
        if key in values:
            raise InvalidParameterError(f"line {lineno}: duplicate parameter key {key!r}")
        try:
            values[key] = float(val.strip())
        except ValueError:
            raise InvalidParameterError(f"line {lineno}: invalid number {val.strip()!r}") from None

    keys = set(values)
    if keys == set(_PHYSICAL_KEYS):
        return PhysicalParams(**values)
    if keys == set(_DIMENSIONLESS_KEYS):
        return DimensionlessParams(**values)
    missing_phys = set(_PHYSICAL_KEYS) - keys
    missing_dim = set(_DIMENSIONLESS_KEYS) - keys
    raise InvalidParameterError(
        "parameter file must define exactly one complete key set; "
        f"missing {sorted(missing_dim)} for dimensionless or {sorted(missing_phys)} for physical"
    )


def load_params_file(path: str | Path) -> PhysicalParams | DimensionlessParams:
    """Read a parameter file (see :func:`parse_params_text` for the format)."""
    return parse_params_text(Path(path).read_text(encoding="utf-8"))

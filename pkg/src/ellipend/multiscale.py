"""Asymptotic rotations for small ellipticity with order-one damping.

The rotation is expanded about the circular zero-gravity branch as

    theta(tau) = -tau + theta0 + eps*theta1(tau) + eps**2*theta2(tau) + ...

with ``sin(theta0) = beta/mu`` and ``w = omega**2/eps`` treated as order
one.  Each correction solves the damped oscillator of :mod:`ellipend.harmonic`
driven by an explicit finite harmonic forcing: two harmonics at first
order, a mean plus harmonics one through four at second order.  The
second-order forcing is assembled by exact trigonometric products, which
keeps the full-equation defect of the order-2 solution at O(eps**3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dynamics import Trajectory
from .errors import InvalidParameterError, NoRotationError
from .harmonic import HarmonicSeries, response_series
from .params import DimensionlessParams

__all__ = [
    "SolutionMethod",
    "AsymptoticSolution",
    "first_order_forcing",
    "theta1_series",
    "theta1_closed_series",
    "second_order_forcing",
    "multiscale_solution",
]


class SolutionMethod(Enum):
    MULTISCALE1 = "multiscale1"
    MULTISCALE2 = "multiscale2"
    AVERAGING2 = "averaging2"


@dataclass(frozen=True)
class AsymptoticSolution:
    """Closed-form evaluable rotation theta(tau) = -tau + theta0 + corrections.

    The corrections enter as ``eps * series1(tau) + eps**2 * series2(tau)``;
    ``series2`` is present only for the order-2 expansion method.  The
    angular velocity is available analytically through the term-wise series
    derivatives.
    """

    method: SolutionMethod
    theta0: float
    eps: float
    series1: HarmonicSeries
    series2: HarmonicSeries | None = None

    def __post_init__(self):
        if (self.series2 is not None) != (self.method is SolutionMethod.MULTISCALE2):
            raise InvalidParameterError(
                "series2 must be present exactly for the order-2 expansion method"
            )

    def theta(self, tau):
        out = -np.asarray(tau, dtype=float) + self.theta0 + self.eps * self.series1.evaluate(tau)
        if self.series2 is not None:
            out = out + self.eps**2 * self.series2.evaluate(tau)
        return float(out) if np.isscalar(tau) else out

    def theta_dot(self, tau):
        out = -1.0 + self.eps * self.series1.evaluate_derivative(tau)
        if self.series2 is not None:
            out = out + self.eps**2 * self.series2.evaluate_derivative(tau)
        if np.isscalar(tau):
            return float(out)
        return np.broadcast_to(out, np.shape(tau)).copy() if np.ndim(out) == 0 else out

    def state(self, tau: float) -> tuple[float, float]:
        return self.theta(tau), self.theta_dot(tau)

    def sample(self, tau0: float = 0.0, tau1: float = 2.0 * math.pi, n_samples: int = 1024) -> Trajectory:
        """Sample the solution on [tau0, tau1) as a Trajectory (no transient)."""
        taus = tau0 + np.arange(n_samples) * ((tau1 - tau0) / n_samples)
        return Trajectory(taus, np.asarray(self.theta(taus)), np.asarray(self.theta_dot(taus)), 0)

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "theta0": self.theta0,
            "eps": self.eps,
            "series1": self.series1.to_dict(),
            "series2": self.series2.to_dict() if self.series2 is not None else None,
        }


def _branch_angle(d: DimensionlessParams) -> float:
    if not 0.0 < d.beta < d.mu:
        raise NoRotationError(
            f"expansion requires 0 < beta < mu, got beta={d.beta}, mu={d.mu}"
        )
    theta0 = math.asin(d.beta / d.mu)
    # branch identities the whole expansion leans on
    assert abs(d.mu * math.sin(theta0) - d.beta) < 1e-12 * max(1.0, d.beta)
    assert d.mu * math.cos(theta0) > 0.0
    return theta0


def _w_value(d: DimensionlessParams) -> float:
    if d.omega == 0.0:
        return 0.0
    return d.w  # raises for eps = 0 with omega != 0


def first_order_forcing(d: DimensionlessParams) -> HarmonicSeries:
    """Forcing of the first-order correction: two harmonics of tau.

    Harmonic one carries the gravity ratio w = omega**2/eps; harmonic two
    carries the ellipticity itself.  Both are phase-rotated by the branch
    angle theta0.
    """
    _branch_angle(d)
    w = _w_value(d)
    cos0 = math.sqrt(1.0 - (d.beta / d.mu) ** 2)
    sin0 = d.beta / d.mu
    return HarmonicSeries.from_terms(
        0.0,
        [
            (1, -w * sin0, w * cos0),
            (2, -sin0, cos0),
        ],
    )


def theta1_series(d: DimensionlessParams) -> HarmonicSeries:
    """First-order correction via the steady-response formula, per unit eps."""
    return response_series(first_order_forcing(d), d.beta, d.mu)


def theta1_closed_series(d: DimensionlessParams) -> HarmonicSeries:
    """First-order correction from the phase-rotated closed form.

    Algebraically identical to :func:`theta1_series`; the two builds differ
    only in arithmetic order, which catches transcription slips in either.
    """
    theta0 = _branch_angle(d)
    w = _w_value(d)
    beta, mu = d.beta, d.mu
    s = math.sqrt(mu * mu - beta * beta)
    cos0, sin0 = math.cos(theta0), math.sin(theta0)
    d2 = 3.0 * beta * beta + mu * mu + 8.0 * (2.0 - s)
    d1 = mu * mu + 1.0 - 2.0 * s
    terms = [
        (2, -(2.0 * beta * cos0 - (4.0 - s) * sin0) / d2,
            -(2.0 * beta * sin0 + (4.0 - s) * cos0) / d2),
    ]
    if w != 0.0:
        terms.append(
            (1, -w * (beta * cos0 - (1.0 - s) * sin0) / d1,
                -w * (beta * sin0 + (1.0 - s) * cos0) / d1)
        )
    return HarmonicSeries.from_terms(0.0, terms)


def second_order_forcing(d: DimensionlessParams, theta1: HarmonicSeries) -> HarmonicSeries:
    """Forcing of the second-order correction: mean plus harmonics 1..4.

    Equals ``beta * theta1**2 / 2 - P * theta1`` where P is the
    phase-quadrature companion of the first-order forcing; the products are
    expanded exactly, so the coefficients inherit no truncation error.
    """
    _branch_angle(d)
    w = _w_value(d)
    cos0 = math.sqrt(1.0 - (d.beta / d.mu) ** 2)
    sin0 = d.beta / d.mu
    # P = cos(2 tau - theta0) + w cos(tau - theta0) expanded on the harmonics
    quadrature = HarmonicSeries.from_terms(
        0.0,
        [
            (1, w * cos0, w * sin0),
            (2, cos0, sin0),
        ],
    )
    return theta1.product(theta1).scaled(0.5 * d.beta) + quadrature.product(theta1).scaled(-1.0)


def multiscale_solution(d: DimensionlessParams, order: int = 2) -> AsymptoticSolution:
    """Expansion solution of the stated order (1 or 2).

    At order 1 the correction is the closed-form pair of rotated harmonics;
    order 2 adds the steady response to the exact second-order forcing.
    For ``eps = 0`` with ``omega = 0`` the corrections vanish and the exact
    circular-case rotation is returned.
    """
    if order not in (1, 2):
        raise InvalidParameterError(f"order must be 1 or 2, got {order}")
    theta0 = _branch_angle(d)
    method = SolutionMethod.MULTISCALE1 if order == 1 else SolutionMethod.MULTISCALE2
    if d.eps == 0.0 and d.omega == 0.0:
        empty = HarmonicSeries()
        return AsymptoticSolution(
            method, theta0, 0.0, empty, empty if order == 2 else None
        )
    series1 = theta1_closed_series(d)
    if order == 1:
        return AsymptoticSolution(method, theta0, d.eps, series1)
    forcing2 = second_order_forcing(d, theta1_series(d))
    series2 = response_series(forcing2, d.beta, d.mu)
    return AsymptoticSolution(method, theta0, d.eps, series1, series2)

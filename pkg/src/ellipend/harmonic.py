"""Finite trigonometric series and the damped-oscillator steady response.

Both asymptotic pipelines express their corrections as finite Fourier
series (a mean plus cos/sin pairs per integer harmonic) driven through the
linear oscillator

    v'' + beta v' + sqrt(mu**2 - beta**2) v = forcing(tau).

:class:`HarmonicSeries` is the shared container; :func:`harmonic_response`
is the closed-form steady response to a single harmonic of that oscillator.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InvalidParameterError, ResonanceError

__all__ = ["HarmonicSeries", "harmonic_response", "response_series", "residual"]


@dataclass(frozen=True)
class HarmonicSeries:
    """Mean plus cos/sin amplitude pairs at integer harmonics of tau.

    Evaluates to ``mean + sum_n (cosAmp_n cos(n tau) + sinAmp_n sin(n tau))``.
    Harmonic indices are unique, positive, and sorted; terms whose two
    amplitudes are both exactly zero are dropped at construction.
    """

    mean: float = 0.0
    terms: tuple[tuple[int, float, float], ...] = ()

    def __post_init__(self):
        indices = [n for n, _, _ in self.terms]
        if any(not isinstance(n, int) or n < 1 for n in indices):
            raise InvalidParameterError("harmonic indices must be positive integers")
        if sorted(set(indices)) != indices:
            raise InvalidParameterError("harmonic indices must be unique and sorted")

    @classmethod
    def from_terms(
        cls, mean: float, terms: Iterable[tuple[int, float, float]]
    ) -> "HarmonicSeries":
        """Build a series, merging duplicate harmonics and dropping zero pairs."""
        acc: dict[int, list[float]] = {}
        for n, c, s in terms:
            a = acc.setdefault(int(n), [0.0, 0.0])
            a[0] += c
            a[1] += s
        cleaned = tuple(
            (n, acc[n][0], acc[n][1])
            for n in sorted(acc)
            if not (acc[n][0] == 0.0 and acc[n][1] == 0.0)
        )
        return cls(float(mean), cleaned)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, tau):
        """Series value at tau (scalar or ndarray)."""
        t = np.asarray(tau, dtype=float)
        out = np.full(t.shape, self.mean)
        for n, c, s in self.terms:
            out += c * np.cos(n * t) + s * np.sin(n * t)
        return float(out) if np.isscalar(tau) or t.ndim == 0 else out

    def evaluate_derivative(self, tau):
        """Exact term-wise derivative at tau."""
        t = np.asarray(tau, dtype=float)
        out = np.zeros(t.shape)
        for n, c, s in self.terms:
            out += n * (-c * np.sin(n * t) + s * np.cos(n * t))
        return float(out) if np.isscalar(tau) or t.ndim == 0 else out

    def evaluate_second_derivative(self, tau):
        """Exact term-wise second derivative at tau."""
        t = np.asarray(tau, dtype=float)
        out = np.zeros(t.shape)
        for n, c, s in self.terms:
            out -= n * n * (c * np.cos(n * t) + s * np.sin(n * t))
        return float(out) if np.isscalar(tau) or t.ndim == 0 else out

    # -- algebra ------------------------------------------------------------

    def __add__(self, other: "HarmonicSeries") -> "HarmonicSeries":
        return HarmonicSeries.from_terms(self.mean + other.mean, self.terms + other.terms)

    def scaled(self, factor: float) -> "HarmonicSeries":
        return HarmonicSeries.from_terms(
            factor * self.mean, ((n, factor * c, factor * s) for n, c, s in self.terms)
        )

    def product(self, other: "HarmonicSeries") -> "HarmonicSeries":
        """Exact trigonometric product, expanded back into a harmonic series.

        Each pair of harmonics (n, m) contributes to harmonics n+m and
        |n-m| through the product-to-sum identities; the result is again a
        finite series with highest harmonic n_max + m_max.
        """
        mean = 0.0
        acc: dict[int, list[float]] = {}

        def add(k: int, c: float, s: float):
            nonlocal mean
            if k == 0:
                mean += c
            else:
                a = acc.setdefault(k, [0.0, 0.0])
                a[0] += c
                a[1] += s

        left = ((0, self.mean, 0.0),) + self.terms
        right = ((0, other.mean, 0.0),) + other.terms
        for n, a1, b1 in left:
            for m, a2, b2 in right:
                add(n + m, (a1 * a2 - b1 * b2) / 2.0, (a1 * b2 + b1 * a2) / 2.0)
                d = n - m
                if d > 0:
                    add(d, (a1 * a2 + b1 * b2) / 2.0, (b1 * a2 - a1 * b2) / 2.0)
                elif d < 0:
                    add(-d, (a1 * a2 + b1 * b2) / 2.0, (a1 * b2 - b1 * a2) / 2.0)
                else:
                    add(0, (a1 * a2 + b1 * b2) / 2.0, 0.0)
        return HarmonicSeries.from_terms(mean, ((n, c, s) for n, (c, s) in acc.items()))

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {"mean": self.mean, "terms": [[n, c, s] for n, c, s in self.terms]}

    @classmethod
    def from_dict(cls, data: dict) -> "HarmonicSeries":
        return cls(float(data["mean"]), tuple((int(n), float(c), float(s)) for n, c, s in data["terms"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "HarmonicSeries":
        return cls.from_dict(json.loads(text))


def _stiffness(beta: float, mu: float) -> float:
    if mu <= 0:
        raise InvalidParameterError(f"mu must be positive, got mu={mu}")
    if abs(beta) > mu:
        raise InvalidParameterError(f"|beta| <= mu required, got beta={beta}, mu={mu}")
    return math.sqrt(mu * mu - beta * beta)


def harmonic_response(
    n: int, A: float, B: float, beta: float, mu: float
) -> tuple[float, float]:
    """Steady cos/sin amplitudes of the damped oscillator driven at harmonic n.

    For ``v'' + beta v' + s v = A cos(n tau) + B sin(n tau)`` with stiffness
    ``s = sqrt(mu**2 - beta**2)`` the unique steady response is returned as
    ``(cosAmp, sinAmp)``.  For ``n = 0`` the response is the constant
    ``A / s`` (B plays no role).

    Raises
    ------
    ResonanceError
        If the response denominator is within ``1e-8 * (1 + mu**2)`` of
        zero; the steady formula is invalid that close to resonance.
    """
    if n < 0:
        raise InvalidParameterError(f"harmonic index must be nonnegative, got n={n}")
    s = _stiffness(beta, mu)
    if n == 0:
        if s == 0.0:
            raise ResonanceError("zero stiffness: constant forcing has no steady response")
        return A / s, 0.0
    denom = (n * n - 1) * beta * beta + mu * mu + n * n * (n * n - 2.0 * s)
    guard = 1e-8 * (1.0 + mu * mu)
    if abs(denom) <= guard:
        raise ResonanceError(
            f"response denominator {denom:.3e} within guard {guard:.3e} at harmonic n={n}"
        )
    cos_amp = -((n * n - s) * A + n * beta * B) / denom
    sin_amp = -(-n * beta * A + (n * n - s) * B) / denom
    return cos_amp, sin_amp


def response_series(forcing: HarmonicSeries, beta: float, mu: float) -> HarmonicSeries:
    """Steady response of the damped oscillator to a whole forcing series."""
    s = _stiffness(beta, mu)
    if forcing.mean != 0.0 and s == 0.0:
        raise ResonanceError("zero stiffness: constant forcing has no steady response")
    mean = forcing.mean / s if forcing.mean != 0.0 else 0.0
    terms = []
    for n, A, B in forcing.terms:
        c, d = harmonic_response(n, A, B, beta, mu)
        terms.append((n, c, d))
    return HarmonicSeries.from_terms(mean, terms)


def residual(
    series: HarmonicSeries,
    forcing: HarmonicSeries,
    beta: float,
    mu: float,
    grid: int = 256,
) -> float:
    """Max absolute defect of the oscillator equation over a uniform grid.

    Evaluates ``|v'' + beta v' + sqrt(mu**2 - beta**2) v - forcing|`` at
    ``grid`` uniform points on one period; a series built by
    :func:`response_series` leaves a defect at rounding level.
    """
    if grid < 16:
        raise InvalidParameterError(f"grid must be at least 16, got {grid}")
    s = _stiffness(beta, mu)
    tau = np.arange(grid) * (2.0 * math.pi / grid)
    defect = (
        series.evaluate_second_derivative(tau)
        + beta * series.evaluate_derivative(tau)
        + s * series.evaluate(tau)
        - forcing.evaluate(tau)
    )
    return float(np.max(np.abs(defect)))

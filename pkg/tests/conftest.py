"""Shared test helpers.

The steady-response and trajectory oracles here run on scipy's integrators
so they stay independent of the package's own Runge-Kutta core.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

TWO_PI = 2.0 * math.pi


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def scipy_pendulum_rhs(eps, mu, beta, omega):
    om2 = omega * omega

    def f(t, y):
        th, td = y
        return [td, -beta * td - mu * np.sin(t + th) + eps * np.sin(t - th) - om2 * np.sin(th)]

    return f


def scipy_orbit_thetadot(d, theta0, theta_dot0, n=1024, rtol=1e-12):
    """Angular velocity over one period from the given initial state (scipy)."""
    f = scipy_pendulum_rhs(d.eps, d.mu, d.beta, d.omega)
    t = np.arange(n) / n * TWO_PI
    sol = solve_ivp(f, (0.0, TWO_PI), [theta0, theta_dot0], rtol=rtol, atol=rtol,
                    dense_output=True)
    return t, sol.sol(t)[1]


def scipy_steady_fourier(n, A, B, beta, mu, transient_periods=None, samples=1024):
    """Steady Fourier pair of the damped oscillator response (scipy + quadrature).

    Integrates v'' + beta v' + sqrt(mu^2-beta^2) v = A cos(n t) + B sin(n t)
    through the transient, then trapezoid-projects one period onto
    cos(n t), sin(n t).  For n = 0 the mean is returned in the cos slot.
    The transient length defaults to whatever the homogeneous decay rate
    beta/2 needs to fall below 1e-9 (capped at 200 periods).
    """
    s = math.sqrt(mu * mu - beta * beta)
    if transient_periods is None:
        transient_periods = min(200, max(5, math.ceil(2.0 * math.log(1e9) / (beta * TWO_PI))))

    def f(t, y):
        return [y[1], -beta * y[1] - s * y[0] + A * np.cos(n * t) + B * np.sin(n * t)]

    t_end = transient_periods * TWO_PI
    t = t_end - TWO_PI + np.arange(samples) / samples * TWO_PI
    sol = solve_ivp(f, (0.0, t_end), [0.0, 0.0], method="DOP853",
                    rtol=1e-11, atol=1e-11, dense_output=True)
    x = sol.sol(t)[0]
    if n == 0:
        return float(np.mean(x)), 0.0
    c = 2.0 * float(np.mean(x * np.cos(n * t)))
    d = 2.0 * float(np.mean(x * np.sin(n * t)))
    return c, d

"""Equations of motion, adaptive integration, periodic rotations, stability.

The dimensionless equation of motion is

    theta'' = -beta theta' - mu sin(tau + theta) + eps sin(tau - theta)
              - omega**2 sin(theta)

integrated by an embedded explicit Runge-Kutta 5(4) pair with PI step-size
control and a fourth-order dense-output interpolant.  Periodic 1:1
rotations are fixed points of the 2*pi return map in the rotating frame
``phi = theta + tau``; they are located by Newton iteration whose Jacobian
comes from the variational equations integrated along the flow, and their
stability follows from the eigenvalues of the same monodromy matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import (
    IntegrationFailureError,
    InvalidParameterError,
    NoOrbitError,
    OrbitDivergedError,
)
from .params import DimensionlessParams, PhysicalParams

__all__ = [
    "State",
    "Trajectory",
    "PeriodicOrbit",
    "rhs",
    "rhs_physical",
    "integrate",
    "integrate_physical",
    "settle_rotating_state",
    "find_periodic_rotation",
    "orbit_trajectory",
    "floquet_multipliers",
    "wrap_angle",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class State:
    """Pendulum state: angle (rad) and angular velocity per dimensionless time."""

    theta: float
    theta_dot: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.theta_dot)):
            raise InvalidParameterError("state components must be finite")


@dataclass(frozen=True)
class Trajectory:
    """Equally spaced samples of (tau, theta, theta_dot), immutable.

    ``steady_start`` is the first sample index past the transient window:
    200 excitation periods after the initial time, or the last index for
    shorter runs.
    """

    tau: np.ndarray
    theta: np.ndarray
    theta_dot: np.ndarray
    steady_start: int

    def __post_init__(self):
        for arr in (self.tau, self.theta, self.theta_dot):
            arr.setflags(write=False)
        if not np.all(np.diff(self.tau) > 0):
            raise InvalidParameterError("tau samples must be strictly increasing")
        if not 0 <= self.steady_start < len(self.tau):
            raise InvalidParameterError("steady_start must index a sample")

    def __len__(self) -> int:
        return len(self.tau)

    def write_csv(self, path: str | Path, comments: list[str] | None = None) -> None:
        """Write ``tau,theta,theta_dot`` rows at 17 significant digits, LF endings."""
        lines = []
        for c in comments or []:
            lines.append(f"# {c}")
        lines.append("tau,theta,theta_dot")
        for t, th, td in zip(self.tau, self.theta, self.theta_dot):
            lines.append(f"{t:.16e},{th:.16e},{td:.16e}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


@dataclass(frozen=True)
class PeriodicOrbit:
    """Fixed point of the 2*pi return map in the rotating frame.

    ``phi0`` and ``v0`` are the rotating-frame angle and velocity at tau = 0
    (``phi = theta + tau``, ``v = theta_dot + 1``); ``residual`` is the
    max-norm defect of the return map at the fixed point.
    """

    phi0: float
    v0: float
    period: float
    residual: float

    @property
    def state(self) -> State:
        """Pendulum-frame initial state of the orbit at tau = 0."""
        return State(self.phi0, self.v0 - 1.0)


def wrap_angle(x: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    y = math.fmod(x + math.pi, TWO_PI)
    if y <= 0.0:
        y += TWO_PI
    return y - math.pi


# ---------------------------------------------------------------------------
# Right-hand sides
# ---------------------------------------------------------------------------


def rhs(tau: float, s: State, d: DimensionlessParams) -> tuple[float, float]:
    """Derivative (theta', theta'') of the dimensionless equation of motion."""
    acc = (
        -d.beta * s.theta_dot
        - d.mu * math.sin(tau + s.theta)
        + d.eps * math.sin(tau - s.theta)
        - d.omega**2 * math.sin(s.theta)
    )
    return s.theta_dot, acc


def rhs_physical(t: float, s: State, p: PhysicalParams) -> tuple[float, float]:
    """Derivative (theta', theta'') in physical time for SI parameters.

    The pivot acceleration of the elliptic path x = X sin(Omega t),
    y = Y cos(Omega t) is substituted directly.
    """
    om2 = p.Omega**2
    acc = (
        -p.c * s.theta_dot / (p.m * p.l**2)
        - (p.g + p.Y * om2 * math.cos(p.Omega * t)) * math.sin(s.theta) / p.l
        - p.X * om2 * math.sin(p.Omega * t) * math.cos(s.theta) / p.l
    )
    return s.theta_dot, acc


def _pendulum_field(d: DimensionlessParams) -> Callable[[float, np.ndarray], np.ndarray]:
    beta, mu, eps, om2 = d.beta, d.mu, d.eps, d.omega**2
    sin = math.sin

    def f(t: float, y: np.ndarray) -> np.ndarray:
        th = y[0]
        return np.array(
            [y[1], -beta * y[1] - mu * sin(t + th) + eps * sin(t - th) - om2 * sin(th)]
        )

    return f


def _physical_field(p: PhysicalParams) -> Callable[[float, np.ndarray], np.ndarray]:
    om = p.Omega
    om2 = om * om
    damp = p.c / (p.m * p.l**2)
    sin, cos = math.sin, math.cos

    def f(t: float, y: np.ndarray) -> np.ndarray:
        th = y[0]
        acc = (
            -damp * y[1]
            - (p.g + p.Y * om2 * cos(om * t)) * sin(th) / p.l
            - p.X * om2 * sin(om * t) * cos(th) / p.l
        )
        return np.array([y[1], acc])

    return f


def _variational_field(d: DimensionlessParams) -> Callable[[float, np.ndarray], np.ndarray]:
    """Flow plus the 2x2 fundamental matrix of its linearization (6 components)."""
    beta, mu, eps, om2 = d.beta, d.mu, d.eps, d.omega**2
    sin, cos = math.sin, math.cos

    def f(t: float, y: np.ndarray) -> np.ndarray:
        th, td, a, b, c, e = y
        acc = -beta * td - mu * sin(t + th) + eps * sin(t - th) - om2 * sin(th)
        stiff = mu * cos(t + th) + eps * cos(t - th) + om2 * cos(th)
        return np.array(
            [td, acc, c, e, -stiff * a - beta * c, -stiff * b - beta * e]
        )

    return f


# ---------------------------------------------------------------------------
# Embedded Runge-Kutta 5(4) core
# ---------------------------------------------------------------------------

# Classic 7-stage explicit 5(4) pair (first-same-as-last).
_RK_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_RK_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0),
)
# Fifth-order weights (the propagated solution equals stage 7's row).
_RK_B = np.array([35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0])
# Difference between fifth- and fourth-order weights: local error estimate.
_RK_E = np.array(
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0]
)
# Fourth-order dense-output interpolant weights (Shampine).
_RK_P = np.array(
    [
        [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0],
        [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0],
        [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0],
        [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0],
        [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0],
    ]
)

_SAFETY = 0.9
_PI_BETA = 0.04  # PI stabilization exponent on the previous error
_ERR_EXPO = 0.2 - 0.75 * _PI_BETA
_MIN_SHRINK = 0.2  # step may shrink at most 5x ...
_MAX_GROWTH = 10.0  # ... and grow at most 10x per accepted step


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(x * x)))


def _initial_step(f, t0: float, y0: np.ndarray, f0: np.ndarray, tol: float, span: float) -> float:
    scale = tol + tol * np.abs(y0)
    d0 = _rms(y0 / scale)
    d1 = _rms(f0 / scale)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = f(t0 + h0, y0 + h0 * f0)
    d2 = _rms((f1 - f0) / scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1, span)


def solve_fixed_samples(
    f: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    t1: float,
    y0: np.ndarray,
    tol: float,
    t_out: np.ndarray,
) -> np.ndarray:
    """Integrate y' = f(t, y) from t0 to t1 and sample at the times t_out.

    Embedded 5(4) pair; both absolute and relative tolerance are set to
    ``tol`` and the weighted RMS local error per step is kept at or below
    one.  Output times must be sorted and lie within [t0, t1]; values at
    interior times come from the fourth-order dense interpolant.

    Raises
    ------
    IntegrationFailureError
        On step-size underflow or non-finite values; carries the last
        accepted time and state.
    """
    if not t1 > t0:
        raise InvalidParameterError(f"t1 must exceed t0, got [{t0}, {t1}]")
    if not 1e-13 <= tol <= 1e-3:
        raise InvalidParameterError(f"tol must lie in [1e-13, 1e-3], got {tol}")
    t_out = np.asarray(t_out, dtype=float)
    if t_out.size and (t_out[0] < t0 or t_out[-1] > t1 or np.any(np.diff(t_out) < 0)):
        raise InvalidParameterError("output times must be sorted and lie within [t0, t1]")

    y = np.array(y0, dtype=float)
    ndim = y.size
    out = np.empty((t_out.size, ndim))
    i_out = 0
    while i_out < t_out.size and t_out[i_out] == t0:
        out[i_out] = y
        i_out += 1

    t = t0
    k = np.empty((7, ndim))
    k[0] = f(t, y)
    h = _initial_step(f, t, y, k[0], tol, t1 - t0)
    fac_old = 1e-4
    min_step = 1e-14 * max(1.0, abs(t0), abs(t1))

    while t < t1:
        h = min(h, t1 - t)
        if h < min_step:
            raise IntegrationFailureError(
                f"step size underflow at tau={t:.6g}", t, tuple(y)
            )
        for i in range(1, 7):
            acc = y.copy()
            a_row = _RK_A[i]
            for j in range(i):
                aij = a_row[j]
                if aij != 0.0:
                    acc = acc + (h * aij) * k[j]
            k[i] = f(t + _RK_C[i] * h, acc)
        y_new = acc  # stage 7 input row equals the fifth-order weights
        err_vec = h * (_RK_E @ k)
        if not np.all(np.isfinite(y_new)) or not np.all(np.isfinite(err_vec)):
            raise IntegrationFailureError(
                f"non-finite state at tau={t:.6g}", t, tuple(y)
            )
        scale = tol + tol * np.maximum(np.abs(y), np.abs(y_new))
        err = _rms(err_vec / scale)

        if err <= 1.0:
            # accept: interpolate any requested output times inside (t, t+h]
            t_new = t + h
            if i_out < t_out.size and t_out[i_out] <= t_new:
                dense_q = k.T @ _RK_P
                while i_out < t_out.size and t_out[i_out] <= t_new:
                    x = (t_out[i_out] - t) / h
                    px = np.array([x, x * x, x**3, x**4])
                    out[i_out] = y + h * (dense_q @ px)
                    i_out += 1
            k[0] = k[6]  # first-same-as-last
            y = y_new
            t = t_new
            err_clipped = max(err, 1e-10)
            factor = (err_clipped**-_ERR_EXPO) * fac_old**_PI_BETA / _SAFETY
            factor = min(_MAX_GROWTH, max(_MIN_SHRINK, factor))
            fac_old = max(err, 1e-4)
            h *= factor
        else:
            h *= max(_MIN_SHRINK, _SAFETY * err**-0.2)

    if i_out < t_out.size:  # endpoint requested exactly
        out[i_out:] = y
    return out


def _final_state(f, t0: float, t1: float, y0: np.ndarray, tol: float) -> np.ndarray:
    return solve_fixed_samples(f, t0, t1, y0, tol, np.array([t1]))[-1]


# ---------------------------------------------------------------------------
# Public integration API
# ---------------------------------------------------------------------------

TRANSIENT_PERIODS = 200


def _steady_start_index(tau: np.ndarray, tau0: float) -> int:
    onset = tau0 + TRANSIENT_PERIODS * TWO_PI
    idx = int(np.searchsorted(tau, onset))
    return min(idx, len(tau) - 1)


def integrate(
    d: DimensionlessParams,
    s0: State,
    tau0: float,
    tau1: float,
    tol: float = 1e-10,
    n_samples: int = 1025,
) -> Trajectory:
    """Integrate the dimensionless equation of motion over [tau0, tau1].

    Returns ``n_samples`` equally spaced samples (endpoints included).
    Identical inputs produce bit-identical trajectories.
    """
    if n_samples < 2:
        raise InvalidParameterError(f"need at least 2 samples, got {n_samples}")
    t_out = np.linspace(tau0, tau1, n_samples)
    ys = solve_fixed_samples(_pendulum_field(d), tau0, tau1, np.array([s0.theta, s0.theta_dot]), tol, t_out)
    return Trajectory(t_out, ys[:, 0].copy(), ys[:, 1].copy(), _steady_start_index(t_out, tau0))


def integrate_physical(
    p: PhysicalParams,
    s0: State,
    t0: float,
    t1: float,
    tol: float = 1e-10,
    n_samples: int = 1025,
) -> Trajectory:
    """Integrate the physical-time equation of motion over [t0, t1] seconds."""
    if n_samples < 2:
        raise InvalidParameterError(f"need at least 2 samples, got {n_samples}")
    t_out = np.linspace(t0, t1, n_samples)
    ys = solve_fixed_samples(_physical_field(p), t0, t1, np.array([s0.theta, s0.theta_dot]), tol, t_out)
    period_t = TWO_PI / p.Omega
    onset = t0 + TRANSIENT_PERIODS * period_t
    idx = min(int(np.searchsorted(t_out, onset)), n_samples - 1)
    return Trajectory(t_out, ys[:, 0].copy(), ys[:, 1].copy(), idx)


def settle_rotating_state(
    d: DimensionlessParams,
    s0: State,
    tol: float = 1e-10,
    max_periods: int = TRANSIENT_PERIODS,
    poincare_tol: float = 1e-9,
) -> tuple[float, float, int]:
    """Integrate period by period until the rotating-frame section settles.

    Starting from ``s0`` at tau = 0, the state is advanced one excitation
    period at a time; the section samples ``(theta + 2 pi k, theta' + 1)``
    converge onto a steady rotation.  Stops early once two successive
    samples differ by less than ``poincare_tol`` in max norm, else after
    ``max_periods``.  Returns ``(phi, v, periods_used)`` with phi wrapped
    to (-pi, pi].
    """
    f = _pendulum_field(d)
    y = np.array([s0.theta, s0.theta_dot])
    prev = None
    periods = 0
    for kk in range(1, max_periods + 1):
        y = _final_state(f, (kk - 1) * TWO_PI, kk * TWO_PI, y, tol)
        periods = kk
        sample = np.array([y[0] + kk * TWO_PI, y[1] + 1.0])
        if prev is not None and float(np.max(np.abs(sample - prev))) < poincare_tol:
            break
        prev = sample
    phi = wrap_angle(y[0] + periods * TWO_PI)
    return phi, y[1] + 1.0, periods


# ---------------------------------------------------------------------------
# Periodic rotations and Floquet stability
# ---------------------------------------------------------------------------


def _return_map(d: DimensionlessParams, phi0: float, v0: float, tol: float):
    """One period of flow plus monodromy from the rotating-frame point."""
    y0 = np.array([phi0, v0 - 1.0, 1.0, 0.0, 0.0, 1.0])
    y = _final_state(_variational_field(d), 0.0, TWO_PI, y0, tol)
    phi1 = y[0] + TWO_PI
    v1 = y[1] + 1.0
    mono = np.array([[y[2], y[3]], [y[4], y[5]]])
    return np.array([phi1, v1]), mono


def _default_guess(d: DimensionlessParams) -> tuple[float, float]:
    ratio = max(-1.0, min(1.0, d.beta / d.mu))
    return math.asin(ratio), 0.0


def find_periodic_rotation(
    d: DimensionlessParams,
    guess: tuple[float, float] | PeriodicOrbit | None = None,
    tol: float = 1e-12,
    residual_tol: float = 1e-10,
    max_iter: int = 50,
) -> PeriodicOrbit:
    """Locate a 1:1 rotation as a fixed point of the 2*pi return map.

    Newton iteration on the rotating-frame variables ``(phi, v)``; the
    Jacobian of the return map is the monodromy matrix obtained from the
    variational equations integrated alongside the flow.  The angle defect
    is wrapped to (-pi, pi) inside the fixed-point comparison only.

    Parameters
    ----------
    guess : (phi0, v0) pair, PeriodicOrbit, or None
        Starting point; defaults to the stable exact branch of the
        circular zero-gravity case.
    tol : float
        Integration tolerance used for the return map.
    residual_tol : float
        Convergence threshold on the max-norm fixed-point defect.

    Raises
    ------
    NoOrbitError
        If Newton fails to converge within ``max_iter`` iterations.
    OrbitDivergedError
        If the iterates blow up.
    """
    if isinstance(guess, PeriodicOrbit):
        x = np.array([guess.phi0, guess.v0])
    elif guess is None:
        x = np.array(_default_guess(d))
    else:
        x = np.array([float(guess[0]), float(guess[1])])

    def defect(point):
        mapped, mono = _return_map(d, point[0], point[1], tol)
        dvec = mapped - point
        dvec[0] = wrap_angle(dvec[0])
        return dvec, mono

    fx, mono = defect(x)
    res = float(np.max(np.abs(fx)))
    for _ in range(max_iter):
        if res < residual_tol:
            return PeriodicOrbit(float(x[0]), float(x[1]), TWO_PI, res)
        if abs(x[1]) > 100.0 or abs(x[0]) > 1e6:
            raise OrbitDivergedError(
                f"shooting iterates diverged at phi={x[0]:.3g}, v={x[1]:.3g}"
            )
        jac = mono - np.eye(2)
        try:
            step = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError as exc:
            raise NoOrbitError(f"singular return-map Jacobian: {exc}") from exc
        lam = 1.0
        for _ in range(20):  # damped Newton: halve until the defect shrinks
            x_try = x + lam * step
            f_try, m_try = defect(x_try)
            r_try = float(np.max(np.abs(f_try)))
            if r_try < res:
                x, fx, mono, res = x_try, f_try, m_try, r_try
                break
            lam *= 0.5
        else:
            raise NoOrbitError(
                f"shooting stalled at residual {res:.3e} (no descent direction)"
            )
    raise NoOrbitError(
        f"no periodic rotation found after {max_iter} iterations (residual {res:.3e})"
    )


def orbit_trajectory(
    orbit: PeriodicOrbit,
    d: DimensionlessParams,
    n_samples: int = 1024,
    tol: float = 1e-12,
) -> Trajectory:
    """Sample one period of a converged orbit at n equally spaced times.

    Samples cover [0, 2*pi) without the duplicate endpoint.
    """
    t_out = np.arange(n_samples) * (TWO_PI / n_samples)
    y0 = np.array([orbit.phi0, orbit.v0 - 1.0])
    ys = solve_fixed_samples(_pendulum_field(d), 0.0, TWO_PI, y0, tol, t_out)
    return Trajectory(t_out, ys[:, 0].copy(), ys[:, 1].copy(), 0)


def floquet_multipliers(
    orbit: PeriodicOrbit, d: DimensionlessParams, tol: float = 1e-12
) -> tuple[complex, complex]:
    """Eigenvalues of the monodromy matrix of the linearization about an orbit.

    Both multipliers strictly inside the unit circle means the rotation is
    asymptotically stable.  Their product always equals ``exp(-2 pi beta)``
    because the linearized flow has constant trace ``-beta``.
    """
    _, mono = _return_map(d, orbit.phi0, orbit.v0, tol)
    vals = np.linalg.eigvals(mono)
    pair = sorted(vals, key=lambda z: (z.real, z.imag))
    return complex(pair[0]), complex(pair[1])

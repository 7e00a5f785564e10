"""Slow-flow analysis for small ellipticity AND small damping.

With ``beta ~ sqrt(eps)`` the rotating deviation is rescaled as
``theta = -tau + sqrt(eps) * v`` so that v obeys a weakly perturbed
oscillator of frequency sqrt(mu).  In amplitude/phase variables
``v = beta_hat/mu + q cos(psi)``, ``v' = -sqrt(mu) q sin(psi)`` and with
phase mismatch ``zeta = psi - tau`` the system takes standard form with a
small right-hand side; period-averaging yields autonomous equations for
the averaged amplitude Q and mismatch Zeta.  Stationary points of the
averaged field are steady rotations; the order-2 reconstruction assembles
an evaluable solution from a stationary point.

The literature's printed first-order stationary amplitude and phase are
inconsistent with the averaged field's own scaling, so stationary states
here always come from root finding; the printed forms are exposed only as
an advisory probe and initial guess (:func:`stationary_closed_form_first`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegenerateParametersError,
    InvalidParameterError,
    NoStationaryStateError,
    SingularAmplitudeError,
)
from .harmonic import HarmonicSeries
from .multiscale import AsymptoticSolution, SolutionMethod
from .params import DimensionlessParams

__all__ = [
    "ScaledParams",
    "AveragedState",
    "averaged_rhs",
    "stationary_state",
    "stationary_closed_form_first",
    "averaged_stability",
    "averaging_solution",
    "oscillator_forcing",
    "forcing_components",
    "standard_form_rhs",
]

_RESIDUAL_TOL = 1e-12
_WRAP = 2.0 * math.pi


def _wrap_phase(z: float) -> float:
    y = math.fmod(z + math.pi, _WRAP)
    if y <= 0.0:
        y += _WRAP
    return y - math.pi


@dataclass(frozen=True)
class ScaledParams:
    """Parameters in the sqrt(eps) scaling of the small-damping analysis."""

    beta_hat: float  # beta / sqrt(eps)
    w: float         # omega**2 / eps
    sqrt_mu: float
    detuning: float  # sqrt(mu) - 1

    @classmethod
    def from_dimensionless(cls, d: DimensionlessParams) -> "ScaledParams":
        if not d.eps > 0:
            raise InvalidParameterError(f"scaled parameters require eps > 0, got {d.eps}")
        sm = math.sqrt(d.mu)
        return cls(d.beta_hat, d.w, sm, sm - 1.0)

    @property
    def mu(self) -> float:
        return self.sqrt_mu**2

    def beta(self, eps: float) -> float:
        return self.beta_hat * math.sqrt(eps)


@dataclass(frozen=True)
class AveragedState:
    """Averaged amplitude and phase mismatch of a steady rotation.

    ``Zeta`` is stored in (-pi, pi]; like any phase it is determined only
    up to 2*pi.  ``trivial`` marks the zero-amplitude branch, on which the
    phase is meaningless.  ``residual`` is the max-norm of the averaged
    field at the state (nan for states not produced by root finding).
    """

    Q: float
    Zeta: float
    order: int
    trivial: bool = False
    residual: float = float("nan")

    def __post_init__(self):
        if self.order not in (1, 2):
            raise InvalidParameterError(f"order must be 1 or 2, got {self.order}")
        if self.Q < 0:
            raise InvalidParameterError("Q must be nonnegative (fold sign into Zeta)")
        object.__setattr__(self, "Zeta", _wrap_phase(self.Zeta))


def averaged_rhs(state: AveragedState, sp: ScaledParams, eps: float) -> tuple[float, float]:
    """(dQ/dtau, dZeta/dtau) of the averaged field at the given order.

    Raises
    ------
    SingularAmplitudeError
        If ``Q <= 0`` (the phase equation divides by Q).
    """
    if state.Q <= 0.0:
        raise SingularAmplitudeError("averaged field needs Q > 0 (phase equation divides by Q)")
    q, z = state.Q, state.Zeta
    se = math.sqrt(eps)
    sm = sp.sqrt_mu
    bh, w = sp.beta_hat, sp.w
    if state.order == 1:
        dq = -(se * w / (2.0 * sm)) * math.cos(z) - (se * bh / 2.0) * q
        dz = sp.detuning + (se * w / (2.0 * sm * q)) * math.sin(z)
        return dq, dz
    shape = eps * bh / 4.0 * (4.0 / sp.mu - 1.0)
    dq = (-se * math.cos(z) + shape * math.sin(z)) * w / (2.0 * sm)
    dq += (-se * bh / 2.0 + eps / (4.0 * sm) * math.sin(2.0 * z)) * q
    dz = sp.detuning + (se * math.sin(z) + shape * math.cos(z)) * w / (2.0 * sm * q)
    dz -= eps * bh * bh / 8.0 * (2.0 / (sp.mu * sm) + 1.0)
    dz += eps / (4.0 * sm) * math.cos(2.0 * z) - eps * sm / 16.0 * q * q
    return dq, dz


def _field_residual(state: AveragedState, sp: ScaledParams, eps: float) -> float:
    """Max-norm of the averaged field; defined on the trivial branch too."""
    if state.Q > 0.0:
        dq, dz = averaged_rhs(state, sp, eps)
        return max(abs(dq), abs(dz))
    # at Q = 0 only the amplitude equation is meaningful
    se = math.sqrt(eps)
    if state.order == 1:
        dq = -(se * sp.w / (2.0 * sp.sqrt_mu)) * math.cos(state.Zeta)
    else:
        shape = eps * sp.beta_hat / 4.0 * (4.0 / sp.mu - 1.0)
        dq = (-se * math.cos(state.Zeta) + shape * math.sin(state.Zeta)) * sp.w / (2.0 * sp.sqrt_mu)
    return abs(dq)


def stationary_closed_form_first(sp: ScaledParams, eps: float) -> AveragedState:
    """Advisory first-order stationary state from the printed closed forms.

    Evaluates ``Q**2 = (omega**2/eps) / (mu (4 (sqrt(mu)-1)**2 + beta**2))``
    and ``Zeta = arctan(2 (mu - 1) / beta)`` on (0, pi].  These expressions
    do not satisfy the averaged field's own scaling (a re-derivation gives
    ``Q**2 = eps w**2 / (mu (4 (sqrt(mu)-1)**2 + beta**2))`` and
    ``tan(Zeta) = 2 (sqrt(mu)-1) / beta``), so the value is advisory only:
    an initial guess and a discrepancy probe, never a result.
    """
    beta = sp.beta(eps)
    if beta <= 0:
        raise InvalidParameterError(f"advisory closed form requires beta > 0, got {beta}")
    denom = sp.mu * (4.0 * sp.detuning**2 + beta * beta)
    if abs(denom) < 1e-300:
        raise DegenerateParametersError("zero denominator in the advisory stationary amplitude")
    q2 = sp.w / denom
    zeta = math.atan(2.0 * (sp.mu - 1.0) / beta)
    if zeta <= 0.0:
        zeta += math.pi
    return AveragedState(math.sqrt(q2), _wrap_phase(zeta), 1)


def _first_order_root(sp: ScaledParams, eps: float) -> AveragedState | None:
    """Exact stationary state of the order-1 averaged field (w != 0)."""
    beta = sp.beta(eps)
    if sp.w == 0.0:
        return None
    denom = sp.mu * (4.0 * sp.detuning**2 + beta * beta)
    if denom < 1e-300:
        return None
    q = math.sqrt(eps * sp.w**2 / denom)
    sin_z = -2.0 * sp.sqrt_mu * q * sp.detuning / (math.sqrt(eps) * sp.w)
    cos_z = -sp.beta_hat * sp.sqrt_mu * q / sp.w
    return AveragedState(q, math.atan2(sin_z, cos_z), 1)


def _parametric_candidates(sp: ScaledParams, eps: float) -> list[AveragedState]:
    """Analytic order-2 stationary candidates for zero gravity (w = 0).

    The amplitude equation forces ``sin(2 Zeta) = 2 sqrt(mu) beta / eps``;
    each admissible phase then fixes Q**2 from the mismatch equation.
    Candidates exist only while ``2 sqrt(mu) beta <= eps``.
    """
    sm = sp.sqrt_mu
    beta = sp.beta(eps)
    s2 = 2.0 * sm * beta / eps
    if abs(s2) > 1.0:
        return []
    out = []
    for c2 in (math.sqrt(1.0 - s2 * s2), -math.sqrt(1.0 - s2 * s2)):
        q2 = (16.0 / (eps * sm)) * (
            sp.detuning
            - (beta * beta / 8.0) * (2.0 / (sp.mu * sm) + 1.0)
            + (eps / (4.0 * sm)) * c2
        )
        if q2 <= 0.0:
            continue
        half = 0.5 * math.atan2(s2, c2)
        for zeta in (half, half + math.pi):
            out.append(AveragedState(math.sqrt(q2), _wrap_phase(zeta), 2))
    return out


def _newton_polish(
    sp: ScaledParams, eps: float, order: int, q0: float, z0: float, max_iter: int = 100
) -> AveragedState | None:
    """Damped Newton on the averaged field; None if it fails to converge."""

    def field(x: np.ndarray) -> np.ndarray:
        dq, dz = averaged_rhs(AveragedState(x[0], x[1], order), sp, eps)
        return np.array([dq, dz])

    def normalize(x: np.ndarray) -> np.ndarray:
        q, z = x
        if q < 0.0:
            q, z = -q, z + math.pi
        return np.array([q, _wrap_phase(z)])

    x = normalize(np.array([q0, z0]))
    if x[0] <= 0.0:
        return None
    try:
        fx = field(x)
    except SingularAmplitudeError:
        return None
    res = float(np.max(np.abs(fx)))
    for _ in range(max_iter):
        if res < _RESIDUAL_TOL:
            return AveragedState(float(x[0]), float(x[1]), order, residual=res)
        jac = np.empty((2, 2))
        for j in range(2):
            h = 1e-7 * max(1.0, abs(x[j]))
            xp, xm = x.copy(), x.copy()
            xp[j] += h
            xm[j] -= h
            try:
                jac[:, j] = (field(xp) - field(xm)) / (2.0 * h)
            except SingularAmplitudeError:
                return None
        try:
            step = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        for _ in range(20):  # halve the step until the residual drops
            x_try = normalize(x + lam * step)
            if x_try[0] <= 1e-12:
                lam *= 0.5
                continue
            try:
                f_try = field(x_try)
            except SingularAmplitudeError:
                lam *= 0.5
                continue
            r_try = float(np.max(np.abs(f_try)))
            if r_try < res:
                x, fx, res = x_try, f_try, r_try
                break
            lam *= 0.5
        else:
            return None
    return None


def stationary_state(
    sp: ScaledParams,
    eps: float,
    order: int,
    guess: AveragedState | tuple[float, float] | None = None,
) -> AveragedState:
    """Stationary point of the averaged field by damped Newton iteration.

    The supplied guess is tried first, then the advisory closed form and
    the re-derived first-order root, then a multi-start ring of eight
    phases Zeta = k pi/4 (the periodic phase creates multiple basins).
    Zero gravity at order 1 admits only the zero-amplitude branch, which
    is returned flagged ``trivial``; the same happens at order 2 once
    ``2 sqrt(mu) beta > eps`` kills the parametric branch.

    Raises
    ------
    NoStationaryStateError
        If no start converges and the trivial branch is not available.
    """
    if order not in (1, 2):
        raise InvalidParameterError(f"order must be 1 or 2, got {order}")
    if guess is not None and not isinstance(guess, AveragedState):
        guess = AveragedState(float(guess[0]), float(guess[1]), order)

    if sp.w == 0.0:
        if order == 1:
            state = AveragedState(0.0, 0.0, 1, trivial=True)
            return replace(state, residual=_field_residual(state, sp, eps))
        candidates = _parametric_candidates(sp, eps)
        if guess is not None and guess.Q > 0.0:
            candidates = [guess] + candidates
        for cand in candidates:
            polished = _newton_polish(sp, eps, 2, cand.Q, cand.Zeta)
            if polished is not None:
                return polished
        state = AveragedState(0.0, 0.0, 2, trivial=True)
        return replace(state, residual=_field_residual(state, sp, eps))

    starts: list[tuple[float, float]] = []
    if guess is not None and guess.Q > 0.0:
        starts.append((guess.Q, guess.Zeta))
    first = _first_order_root(sp, eps)
    if first is not None:
        starts.append((first.Q, first.Zeta))
    beta = sp.beta(eps)
    if beta > 0:
        try:
            adv = stationary_closed_form_first(sp, eps)
            starts.append((adv.Q, adv.Zeta))
        except DegenerateParametersError:
            pass
    ring_q = starts[0][0] if starts else 1.0
    starts.extend((ring_q, k * math.pi / 4.0) for k in range(8))
    for q0, z0 in starts:
        polished = _newton_polish(sp, eps, order, q0, z0)
        if polished is not None:
            return polished
    raise NoStationaryStateError(
        f"averaged field has no reachable stationary point (order {order}, "
        f"beta_hat={sp.beta_hat}, w={sp.w}, mu={sp.mu}, eps={eps})"
    )


def averaged_stability(state: AveragedState, sp: ScaledParams, eps: float) -> bool:
    """True iff the averaged-flow Jacobian at the state is strictly stable.

    Regular states use a central finite-difference Jacobian (step 1e-7).
    On the trivial branch the phase is meaningless, so stability reduces to
    the amplitude direction: decay rate ``-sqrt(eps) beta_hat / 2`` at
    order 1, worst case over phases
    ``-sqrt(eps) beta_hat / 2 + eps / (4 sqrt(mu))`` at order 2.
    """
    if state.trivial or state.Q == 0.0:
        rate = -math.sqrt(eps) * sp.beta_hat / 2.0
        if state.order == 2:
            rate += eps / (4.0 * sp.sqrt_mu)
        return rate < 0.0

    def field(x):
        dq, dz = averaged_rhs(AveragedState(max(x[0], 1e-300), x[1], state.order), sp, eps)
        return np.array([dq, dz])

    x = np.array([state.Q, state.Zeta])
    jac = np.empty((2, 2))
    for j in range(2):
        h = 1e-7
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        jac[:, j] = (field(xp) - field(xm)) / (2.0 * h)
    return bool(np.all(np.linalg.eigvals(jac).real < 0.0))


# ---------------------------------------------------------------------------
# Exact standard form (for oracles and diagnostics)
# ---------------------------------------------------------------------------


def oscillator_forcing(tau: float, q: float, psi: float, sp: ScaledParams, eps: float) -> float:
    """Exact small forcing f(tau, q, psi) of the rescaled oscillator.

    This is the full right-hand side, not its expansion: the residual of
    the generating oscillator evaluated on the amplitude/phase chart.
    """
    se = math.sqrt(eps)
    v = sp.beta_hat / sp.mu + q * math.cos(psi)
    v_dot = -sp.sqrt_mu * q * math.sin(psi)
    return (
        sp.mu * (v - math.sin(se * v) / se)
        - se * sp.beta_hat * v_dot
        + se * math.sin(2.0 * tau - se * v)
        + se * sp.w * math.sin(tau - se * v)
    )


def forcing_components(tau: float, q: float, psi: float, sp: ScaledParams) -> tuple[float, float]:
    """The sqrt(eps) and eps coefficients of the forcing expansion (f1, f2)."""
    v = sp.beta_hat / sp.mu + q * math.cos(psi)
    f1 = math.sin(2.0 * tau) + sp.w * math.sin(tau) + sp.beta_hat * q * sp.sqrt_mu * math.sin(psi)
    f2 = -(math.cos(2.0 * tau) + sp.w * math.cos(tau)) * v + sp.mu * v**3 / 6.0
    return f1, f2


def standard_form_rhs(
    tau: float, q: float, zeta: float, sp: ScaledParams, eps: float
) -> tuple[float, float]:
    """Exact (dq, dzeta) of the standard-form system before averaging."""
    if q <= 0.0:
        raise SingularAmplitudeError("standard form needs q > 0")
    psi = zeta + tau
    f = oscillator_forcing(tau, q, psi, sp, eps)
    dq = -math.sin(psi) * f / sp.sqrt_mu
    dzeta = sp.detuning - math.cos(psi) * f / (q * sp.sqrt_mu)
    return dq, dzeta


# ---------------------------------------------------------------------------
# Reconstruction
# ---------------------------------------------------------------------------


def _build_solution(d: DimensionlessParams, state: AveragedState) -> AsymptoticSolution:
    sp = ScaledParams.from_dimensionless(d)
    se = math.sqrt(d.eps)
    sm = sp.sqrt_mu
    q, z = state.Q, state.Zeta
    theta0 = d.beta / d.mu + se * (d.beta * q / 4.0) * math.sin(z)
    # tau-dependent part, stored per unit eps so the shared evaluable
    # theta = -tau + theta0 + eps*series1 applies unchanged
    series1 = HarmonicSeries.from_terms(
        0.0,
        [
            (1, q * math.cos(z) / se, -q * math.sin(z) / se + sp.w / (4.0 * sm)),
            (2, 0.0, -1.0 / (3.0 * sm)),
        ],
    )
    return AsymptoticSolution(SolutionMethod.AVERAGING2, theta0, d.eps, series1)


def averaging_solution(
    d: DimensionlessParams, state: AveragedState | None = None
) -> AsymptoticSolution:
    """Order-2 reconstructed rotation from a stationary averaged state.

    The stationary state is found by root finding (stable states
    preferred; with several converged candidates the first stable one in
    the deterministic search order wins).  Pass ``state`` to reconstruct
    from a specific averaged state instead.

    The method targets the small-damping regime; it evaluates anywhere in
    the existence window but degrades once beta stops being O(sqrt(eps)).
    """
    if state is None:
        sp = ScaledParams.from_dimensionless(d)
        if sp.w == 0.0:
            candidates = [
                _newton_polish(sp, d.eps, 2, c.Q, c.Zeta)
                for c in _parametric_candidates(sp, d.eps)
            ]
            candidates = [c for c in candidates if c is not None]
            if not candidates:
                state = AveragedState(0.0, 0.0, 2, trivial=True, residual=0.0)
            else:
                stable = [c for c in candidates if averaged_stability(c, sp, d.eps)]
                state = stable[0] if stable else candidates[0]
        else:
            state = stationary_state(sp, d.eps, 2)
            if not averaged_stability(state, sp, d.eps):
                # walk the multi-start ring for a stable alternative
                for k in range(8):
                    alt = _newton_polish(sp, d.eps, 2, state.Q, k * math.pi / 4.0)
                    if alt is not None and averaged_stability(alt, sp, d.eps):
                        state = alt
                        break
    return _build_solution(d, state)

"""Closed-form rotation branches for the circular, zero-gravity case.

With equal semiaxes (eps = 0) and no gravity (omega = 0) the equation of
motion admits uniform rotations ``theta = theta0 - tau`` whenever
``sin(theta0) = beta / mu``.  The branch ``theta0 = arcsin(beta/mu)`` is
asymptotically stable for ``0 < beta < mu``; the mirrored branch
``pi - arcsin(beta/mu)`` is always unstable, as is everything at negative
damping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import InvalidParameterError, NoRotationError, NotABranchError

__all__ = ["ExactRotation", "exact_branches", "stability_check", "existence_window"]


@dataclass(frozen=True)
class ExactRotation:
    """One uniform-rotation branch: theta(tau) = theta0 - tau."""

    theta0: float
    k: int
    stable: bool


def exact_branches(
    beta: float, mu: float, k_range: Iterable[int] = (0,)
) -> list[ExactRotation]:
    """All rotation branches theta0 = arcsin(beta/mu) + 2 pi k and its mirror.

    The arcsin branch is stable iff ``beta > 0`` and ``cos(theta0) > 0``;
    the mirrored branch is unstable; for ``beta < 0`` both are unstable.
    Branches at different ``k`` describe the same physical rotation, so the
    default enumerates ``k = 0`` only.

    Raises
    ------
    NoRotationError
        If ``|beta| > mu`` (the branch equation has no solution).
    """
    if not mu > 0:
        raise InvalidParameterError(f"mu must be positive, got mu={mu}")
    if abs(beta) > mu:
        raise NoRotationError(f"no rotation: |beta| = {abs(beta)} exceeds mu = {mu}")
    base = math.asin(beta / mu)
    branches = []
    for k in k_range:
        primary = base + 2.0 * math.pi * k
        mirrored = math.pi - base + 2.0 * math.pi * k
        branches.append(ExactRotation(primary, k, beta > 0 and mu * math.cos(primary) > 0))
        branches.append(ExactRotation(mirrored, k, False))
    return branches


def stability_check(beta: float, mu: float, theta0: float) -> bool:
    """Linearized stability of the rotation with constant angle theta0.

    The branch must satisfy ``sin(theta0) = beta/mu`` to within 1e-9; the
    rotation is asymptotically stable iff ``beta > 0`` and
    ``mu cos(theta0) > 0``.

    Raises
    ------
    NotABranchError
        If theta0 does not satisfy the branch equation.
    """
    if not mu > 0:
        raise InvalidParameterError(f"mu must be positive, got mu={mu}")
    if abs(math.sin(theta0) - beta / mu) > 1e-9:
        raise NotABranchError(
            f"theta0={theta0} is not a rotation branch for beta={beta}, mu={mu}"
        )
    return beta > 0 and mu * math.cos(theta0) > 0


def existence_window(beta: float, mu: float) -> bool:
    """True iff a stable rotation exists: strictly 0 < beta < mu."""
    return 0.0 < beta < mu

"""Shrinking solitons (eps = -1): closed orbits, teardrops and the football inverse problem.

In normalized coordinates ``(v, w) = (a h, a u)`` the orbits are level sets of
``v^2 - 2w - ln|2w - 1|``.  On the axis ``v = 0`` this reduces, via
``y = 1 - 2w`` and ``k = e^C``, to ``|y| = k e^(y - 1)``: the two positive
roots ``y1 = 1 - p`` and ``y2 = 1 + q`` are the two pinch slopes of one closed
orbit, and the ratio of its cone angles is ``p/q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import (
    SLOPE_TOL,
    TWO_PI,
    ClassKind,
    ConeAngle,
    PhasePoint,
    SolitonClass,
    SolitonParams,
    Trajectory,
)
from .errors import DomainError, EqualAngles, InvalidParams, InvalidPinchSlope, NoTwoPositiveRoots, RootNotBracketed
from .ode import IntegratorControls, integrate
from .rootfind import newton_bisect

Y_CAP = 700.0  # e^(y-1) overflows shortly beyond this
_LOG_K_MIN = math.log(Y_CAP) - (Y_CAP - 1.0)


@dataclass(frozen=True)
class FootballSolution:
    k: float
    y1: float
    y2: float
    p: float
    q: float
    a: float
    A: float
    u_exit: float
    alpha1: float
    alpha2: float
    trajectory: Trajectory | None = None

    def to_record(self) -> dict:
        return {
            "alpha1_deg": math.degrees(self.alpha1),
            "alpha2_deg": math.degrees(self.alpha2),
            "k": self.k,
            "y1": self.y1,
            "y2": self.y2,
            "a": self.a,
            "A": self.A,
            "u_exit": self.u_exit,
            "class": ClassKind.FOOTBALL.value,
        }


def eqham_residual(k: float, y: float) -> float:
    return abs(y) - k * math.exp(y - 1.0)


def _solve_p(log_k: float) -> float:
    """``p = 1 - y1``; near ``k = 1`` solved in ``p`` itself, otherwise in ``ln y1``."""
    if log_k > -1.0:
        # 1 - p = k e^(-p)  <=>  log1p(-p) + p = ln k, decreasing on (0, 1)
        g = lambda p: math.log1p(-p) + p - log_k  # noqa: E731
        dg = lambda p: -p / (1.0 - p)  # noqa: E731
        return newton_bisect(g, dg, 0.0, 1.0 - 1e-16)
    return 1.0 - math.exp(_solve_log_y1(log_k))


def _solve_log_y1(log_k: float) -> float:
    # y1 = k e^(y1 - 1) with t = ln y1:  t - e^t + 1 = ln k, increasing for t < 0
    g = lambda t: t - math.exp(t) + 1.0 - log_k  # noqa: E731
    dg = lambda t: 1.0 - math.exp(t)  # noqa: E731
    return newton_bisect(g, dg, log_k - 2.0, min(0.0, log_k + 1.0))


def _solve_q(log_k: float) -> float:
    # 1 + q = k e^q  <=>  log1p(q) - q = ln k, decreasing on (0, inf)
    g = lambda q: math.log1p(q) - q - log_k  # noqa: E731
    dg = lambda q: -q / (1.0 + q)  # noqa: E731
    hi = 1.0
    while g(hi) > 0:
        if hi >= Y_CAP - 1.0:
            raise RootNotBracketed(f"y2 exceeds the search cap {Y_CAP} for ln k = {log_k}")
        hi = min(2.0 * hi, Y_CAP - 1.0)
    return newton_bisect(g, dg, 0.0, hi)


def _solve_neg(log_k: float) -> float:
    # -y = k e^(y - 1) with t = ln(-y):  t + e^t + 1 = ln k, increasing
    g = lambda t: t + math.exp(t) + 1.0 - log_k  # noqa: E731
    dg = lambda t: 1.0 + math.exp(t)  # noqa: E731
    return -math.exp(newton_bisect(g, dg, log_k - 2.0, log_k - 1.0 + 1e-12))


def solve_eqham(k: float) -> tuple[float, float, float]:
    """The three real roots ``(y1, y2, y_neg)`` of ``|y| = k e^(y - 1)``.

    ``k = 1`` is the tangency: ``y1 = y2 = 1`` exactly.
    """
    if not k > 0:
        raise DomainError(f"k must be > 0, got {k!r}")
    log_k = math.log(k)
    y_neg = _solve_neg(log_k)
    if k > 1:
        raise NoTwoPositiveRoots(f"k = {k!r} > 1: the line y/k misses e^(y-1)")
    if k == 1:
        return 1.0, 1.0, y_neg
    y1 = 1.0 - _solve_p(log_k) if log_k > -1.0 else math.exp(_solve_log_y1(log_k))
    return y1, 1.0 + _solve_q(log_k), y_neg


def _pq(log_k: float) -> tuple[float, float]:
    if log_k >= 0:
        return 0.0, 0.0
    return _solve_p(log_k), _solve_q(log_k)


def psi(k: float) -> float:
    """Cone-angle ratio ``p/q`` of the closed orbit labelled by ``k``."""
    if not 0 < k < 1:
        raise DomainError(f"psi is defined on (0, 1), got {k!r}")
    p, q = _pq(math.log(k))
    return p / q


def psi_inverse(x: float, tol: float = 1e-13) -> float:
    """``k`` with ``psi(k) = x``, by bisection in ``ln k``.

    Bisection runs on ``ln k`` so that ratios near 0, whose ``k`` is
    exponentially small, are resolved with the same relative accuracy.
    """
    if not 0 < x < 1:
        raise DomainError(f"angle ratio must lie in (0, 1), got {x!r}")
    lo, hi = _LOG_K_MIN, 0.0
    p, q = _pq(lo)
    if p / q > x:
        raise RootNotBracketed(
            f"ratio {x!r} is below psi at the y2 search cap ({p / q:.3e}); cone angles too disparate"
        )
    # relative stop: near k = 1 psi moves like sqrt(-ln k)
    while hi - lo > tol * min(1.0, abs(lo) + abs(hi)):
        mid = 0.5 * (lo + hi)
        p, q = _pq(mid)
        if p / q < x:
            lo = mid
        else:
            hi = mid
    return math.exp(0.5 * (lo + hi))


def solve_football(alpha1: float, alpha2: float, controls: IntegratorControls | None = None) -> FootballSolution:
    """The unique ``a > 0`` whose shrinking orbit has cone angles ``alpha1 < alpha2`` (radians)."""
    if not (alpha1 > 0 and alpha2 > 0):
        raise InvalidParams("cone angles must be positive")
    if abs(alpha1 - alpha2) <= 1e-12 * alpha2:
        raise EqualAngles(alpha1)
    if alpha1 > alpha2:
        raise InvalidParams(f"require alpha1 < alpha2, got {alpha1!r} > {alpha2!r}")
    k = psi_inverse(alpha1 / alpha2)
    y1, y2, _ = solve_eqham(k)
    p, q = _pq(math.log(k))
    # alpha1 = 2 pi u(0) = (pi / a) p, so a = pi p / alpha1
    a = math.pi * p / alpha1
    params = SolitonParams(-1, a)
    traj, _ = integrate(params, PhasePoint(0.0, alpha1 / TWO_PI), controls=controls)
    if traj.termination != "pinch":
        raise ArithmeticError(f"football orbit did not close (termination={traj.termination})")
    return FootballSolution(
        k=k, y1=y1, y2=y2, p=p, q=q, a=a,
        A=float(traj.r[-1]), u_exit=float(traj.u[-1]),
        alpha1=alpha1, alpha2=alpha2, trajectory=traj,
    )


def closed_orbit(a: float, b: float, controls: IntegratorControls | None = None) -> Trajectory:
    """Integrate from the pinch ``(0, b)`` to the far pinch (requires ``b < 1/(2a)``)."""
    traj, _ = integrate(SolitonParams(-1, a), PhasePoint(0.0, b), controls=controls)
    return traj


def _sine_profile_match(traj: Trajectory, tol: float = 1e-3) -> bool:
    # round profile with smooth poles: h = sqrt(2) sin(r / sqrt(2))
    r = traj.r - traj.r[0]
    ref = math.sqrt(2.0) * np.sin(r / math.sqrt(2.0))
    return bool(np.max(np.abs(traj.h - ref)) < tol)


ISOCLINE = "isocline"


def classify_shrinking(a: float, b: float | str, controls: IntegratorControls | None = None) -> SolitonClass:
    """Classify the shrinking orbit leaving the pinch with slope ``b`` (or on the isocline)."""
    SolitonParams(-1, a)  # validates a
    iso = 1.0 / (2.0 * a)
    if b == ISOCLINE or (isinstance(b, (int, float)) and abs(b - iso) < SLOPE_TOL):
        if abs(a - 0.5) < 1e-12:
            return SolitonClass(ClassKind.GAUSSIAN_PLANE, -1, apex=ConeAngle(TWO_PI), curvature_sign=0)
        return SolitonClass(ClassKind.GAUSSIAN_CONE, -1, apex=ConeAngle(math.pi / a), curvature_sign=0)
    if isinstance(b, str):
        raise InvalidPinchSlope(f"unknown flag {b!r}")
    if not math.isfinite(b) or abs(b) < SLOPE_TOL:
        raise InvalidPinchSlope(f"pinch slope must be a nonzero real, got {b!r}")
    if b > iso:
        return SolitonClass(
            ClassKind.OPEN_UNBOUNDED, -1, apex=ConeAngle(TWO_PI * abs(b)),
            rejected_reason="above the isocline u = 1/(2a): u is unbounded, curvature not bounded below",
        )
    traj = closed_orbit(a, b, controls)
    if traj.termination != "pinch":
        raise ArithmeticError(f"closed orbit expected, integration ended with {traj.termination}")
    u_far = float(traj.u[-1])
    first = ConeAngle(TWO_PI * abs(b))
    second = ConeAngle(TWO_PI * abs(u_far))
    s1, s2 = first.is_smooth(), second.is_smooth()
    if s1 and s2:
        if _sine_profile_match(traj):
            return SolitonClass(ClassKind.SPHERICAL, -1, apex=first, apex2=second, curvature_sign=1,
                                note="spherical candidate: a > 0 orbits are never exactly round")
        return SolitonClass(ClassKind.TEARDROP, -1, apex=second if abs(second.slope - 1) > abs(first.slope - 1) else first,
                            curvature_sign=1)
    if s1 or s2:
        return SolitonClass(ClassKind.TEARDROP, -1, apex=second if s1 else first, curvature_sign=1)
    return SolitonClass(ClassKind.FOOTBALL, -1, apex=first, apex2=second, curvature_sign=1)

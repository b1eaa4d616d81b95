"""Exact profiles: the steady Riccati families and the constant-curvature (a = 0) solutions.

Steady orbits satisfy ``h' = (a/2) h^2 + C``.  Substituting
``h = A tan(k r + s)`` gives ``A k = C`` and ``k / A = a/2``, hence
``A = sqrt(2C/a)``, ``k = sqrt(aC/2)``; the tanh branch carries ``A < 0``.
Every family is certified by the residual of ``h'' - a h h' - (eps/2) h``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .domain import Trajectory
from .errors import InvalidParams, OutOfDomain

SQRT_HALF = 1.0 / math.sqrt(2.0)


class Family(str, enum.Enum):
    STEADY_TAN = "SteadyTan"
    STEADY_TANH = "SteadyTanh"
    STEADY_RATIONAL = "SteadyRational"
    CONST_CURV_EXP = "ConstCurvExp"
    CONST_CURV_LINEAR = "ConstCurvLinear"
    CONST_CURV_TRIG = "ConstCurvTrig"


@dataclass(frozen=True)
class ClosedForm:
    """An analytic profile on the open interval ``domain``.

    Steady families: ``amplitude * tan(rate r + shift)``, the same with
    ``tanh``, and ``amplitude / (shift - rate r)``.  Constant-curvature
    families read ``amplitude`` and ``shift`` as the two linear coefficients
    ``c1, c2`` of their fundamental solutions with frequency ``rate``.
    """

    family: Family
    amplitude: float
    rate: float
    shift: float
    domain: tuple[float, float]
    epsilon: int
    a: float

    @property
    def steady(self) -> bool:
        return self.family in (Family.STEADY_TAN, Family.STEADY_TANH, Family.STEADY_RATIONAL)

    def contains(self, r: float) -> bool:
        lo, hi = self.domain
        return lo < r < hi


def steady_family(a: float, C: float, D: float = 0.0) -> ClosedForm:
    """Steady profile on the parabola ``u = (a/2) h^2 + C``.

    ``D`` is the phase shift for ``C != 0`` and ``1/h(0)`` for ``C = 0``.
    """
    if not a > 0:
        raise InvalidParams(f"a must be > 0, got {a!r}")
    if C > 0:
        amp, rate = math.sqrt(2 * C / a), math.sqrt(a * C / 2)
        dom = ((-math.pi / 2 - D) / rate, (math.pi / 2 - D) / rate)
        return ClosedForm(Family.STEADY_TAN, amp, rate, D, dom, 0, a)
    if C < 0:
        amp, rate = -math.sqrt(-2 * C / a), math.sqrt(-a * C / 2)
        return ClosedForm(Family.STEADY_TANH, amp, rate, D, (-math.inf, math.inf), 0, a)
    return ClosedForm(Family.STEADY_RATIONAL, 1.0, a / 2, D, (-math.inf, 2 * D / a), 0, a)


def const_curvature(epsilon: int, c1: float, c2: float) -> ClosedForm:
    """Solutions of ``h'' = (eps/2) h`` (the ``a = 0`` solitons)."""
    if c1 == 0 and c2 == 0:
        raise InvalidParams("(c1, c2) = (0, 0) is the degenerate zero profile")
    full = (-math.inf, math.inf)
    if epsilon == 1:
        return ClosedForm(Family.CONST_CURV_EXP, c1, SQRT_HALF, c2, full, 1, 0.0)
    if epsilon == 0:
        return ClosedForm(Family.CONST_CURV_LINEAR, c1, 1.0, c2, full, 0, 0.0)
    if epsilon == -1:
        return ClosedForm(Family.CONST_CURV_TRIG, c1, SQRT_HALF, c2, full, -1, 0.0)
    raise InvalidParams(f"epsilon must be -1, 0 or +1, got {epsilon!r}")


def spherical_football(alpha: float) -> ClosedForm:
    """Round football with two equal cone angles ``alpha``: ``h = c1 sin(r/sqrt 2)`` on ``(0, pi sqrt 2)``."""
    if not alpha > 0:
        raise InvalidParams("cone angle must be positive")
    c1 = math.sqrt(2.0) * alpha / (2 * math.pi)
    form = const_curvature(-1, c1, 0.0)
    return ClosedForm(form.family, c1, SQRT_HALF, 0.0, (0.0, math.pi * math.sqrt(2.0)), -1, 0.0)


def _derivs(form: ClosedForm, r):
    """``(h, h', h'')`` without domain checks; works on arrays."""
    A, k, s = form.amplitude, form.rate, form.shift
    fam = form.family
    if fam == Family.STEADY_TAN:
        t = np.tan(k * r + s)
        h = A * t
        d1 = A * k * (1 + t * t)
        return h, d1, 2 * k * t * d1
    if fam == Family.STEADY_TANH:
        t = np.tanh(k * r + s)
        h = A * t
        d1 = A * k * (1 - t * t)
        return h, d1, -2 * k * t * d1
    if fam == Family.STEADY_RATIONAL:
        g = s - k * r
        return A / g, A * k / g**2, 2 * A * k * k / g**3
    if fam == Family.CONST_CURV_EXP:
        e1, e2 = np.exp(k * r), np.exp(-k * r)
        return A * e1 + s * e2, k * (A * e1 - s * e2), k * k * (A * e1 + s * e2)
    if fam == Family.CONST_CURV_LINEAR:
        r = np.asarray(r, dtype=float)
        return A * r + s, A + 0 * r, 0 * r
    sn, cs = np.sin(k * r), np.cos(k * r)
    return A * sn + s * cs, k * (A * cs - s * sn), -k * k * (A * sn + s * cs)


def evaluate(form: ClosedForm, r: float) -> tuple[float, float]:
    """Exact ``(h, h')`` at ``r``."""
    if not form.contains(r):
        raise OutOfDomain(f"r={r!r} outside {form.family.value} domain {form.domain}")
    h, d1, _ = _derivs(form, r)
    return float(h), float(d1)


def residual(form: ClosedForm, r) -> np.ndarray:
    """Pointwise residual of ``h'' - a h h' - (eps/2) h`` (``a = 0`` for constant curvature)."""
    h, d1, d2 = _derivs(form, np.asarray(r, dtype=float))
    return d2 - form.a * h * d1 - form.epsilon / 2.0 * h


def certify(form: ClosedForm, n: int = 100, margin: float = 0.05, span: float = 10.0) -> float:
    """Max |residual| over ``n`` uniform points of the domain, clipped to ``[-span, span]`` and shrunk by ``margin``."""
    lo, hi = form.domain
    lo = max(lo, -span) if math.isinf(lo) else lo
    hi = min(hi, span) if math.isinf(hi) else hi
    width = hi - lo
    r = np.linspace(lo + margin * width, hi - margin * width, n)
    return float(np.max(np.abs(residual(form, r))))


def closedness_integral(traj: Trajectory) -> float:
    """``integral of h u^2 dr`` along a trajectory (Simpson on the dense output).

    Multiplying the profile equation by ``h'`` shows that between two pinches
    it equals ``(u_A^2 - u_0^2) / (2a)``; it vanishes for equal angles only if ``a = 0``.
    """
    r = traj.r
    if len(r) < 2:
        return 0.0
    mid = [traj.at(x) for x in 0.5 * (r[1:] + r[:-1])]
    fm = np.array([p.h * p.u**2 for p in mid])
    f = traj.h * traj.u**2
    return float(np.sum(np.diff(r) * (f[:-1] + 4 * fm + f[1:]) / 6))

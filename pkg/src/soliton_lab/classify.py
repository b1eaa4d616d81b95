"""Steady classification and the case dispatcher.

Steady orbits are the parabolas ``u = (a/2) h^2 + C`` with ``C = u - (a/2) h^2``.
An orbit through a pinch has ``C = b``.
"""

from __future__ import annotations

import math

from .domain import SLOPE_TOL, TWO_PI, ClassKind, ConeAngle, PhasePoint, SolitonClass, SolitonParams
from .errors import InvalidPinchSlope
from .expanding import classify_expanding
from .shrinking import classify_shrinking

EXPLODING_REASON = "h blows up at finite r (tan family): the metric is not complete"
CUSP_REASON = "rational family: cusp end at r -> -inf and finite-r blow-up, not complete"
BOUNDARY_REASON = "emanates from the fixed circle h = sqrt(2|C|/a) and blows up at finite r: not complete"


def classify_steady(a: float, b: float) -> SolitonClass:
    """Classify the steady orbit through the pinch ``(0, b)``."""
    SolitonParams(0, a)
    if not math.isfinite(b):
        raise InvalidPinchSlope(f"pinch slope must be finite, got {b!r}")
    if abs(b) < SLOPE_TOL:
        return SolitonClass(ClassKind.CUSP_INCOMPLETE, 0, rejected_reason=CUSP_REASON)
    if b > 0:
        return SolitonClass(ClassKind.EXPLODING, 0, apex=ConeAngle(TWO_PI * b), rejected_reason=EXPLODING_REASON)
    if abs(b + 1.0) < SLOPE_TOL:
        return SolitonClass(ClassKind.CIGAR, 0, curvature_sign=1)
    return SolitonClass(ClassKind.CONE_CIGAR, 0, apex=ConeAngle(-TWO_PI * b), curvature_sign=1)


def classify_steady_seed(a: float, seed: PhasePoint) -> SolitonClass:
    """Classify the steady orbit through an arbitrary seed ``(h, u)`` with ``h >= 0``."""
    SolitonParams(0, a)
    if seed.h > 0 and seed.u == 0:
        return SolitonClass(ClassKind.FLAT_CYLINDER, 0, curvature_sign=0)
    C = seed.u - a * seed.h * seed.h / 2.0
    if C < 0 and seed.u > 0:
        return SolitonClass(ClassKind.BOUNDARY_INCOMPLETE, 0, rejected_reason=BOUNDARY_REASON)
    if C < 0 and seed.h > 0:
        # the branch below the fixed circle reaches the pinch with slope C
        return classify_steady(a, C)
    if C < 0:
        return classify_steady(a, seed.u)
    if C == 0:
        return SolitonClass(ClassKind.CUSP_INCOMPLETE, 0, rejected_reason=CUSP_REASON)
    return SolitonClass(ClassKind.EXPLODING, 0, rejected_reason=EXPLODING_REASON)


def classify(epsilon: int, a: float, b: float | str) -> SolitonClass:
    """Dispatch to the case classifier; ``b`` is the pinch slope or a flag."""
    params = SolitonParams(epsilon, a)
    if params.epsilon == -1:
        return classify_shrinking(a, b)
    if params.epsilon == 1:
        return classify_expanding(a, b)
    if isinstance(b, str):
        raise InvalidPinchSlope(f"steady solitons take a numeric pinch slope, got {b!r}")
    return classify_steady(a, b)

"""Core value types and the scalar geometry of a rotationally symmetric soliton.

A soliton metric is ``dr^2 + h(r)^2 dtheta^2`` with potential ``f' = a h``.
Everything downstream works with the reduced state ``(h, u = h')``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidParams, OutOfRange, ZeroSlope

TWO_PI = 2.0 * math.pi

# global numerical thresholds; a zero of h is a pinch, |u| = 1 there is smooth
PINCH_TOL = 1e-9
SLOPE_TOL = 1e-6


@dataclass(frozen=True)
class SolitonParams:
    """Case selector ``epsilon`` (-1 shrinking, 0 steady, +1 expanding) and slope ``a > 0``."""

    epsilon: int
    a: float

    def __post_init__(self):
        if self.epsilon not in (-1, 0, 1):
            raise InvalidParams(f"epsilon must be -1, 0 or +1, got {self.epsilon!r}")
        if not (isinstance(self.a, (int, float)) and math.isfinite(self.a) and self.a > 0):
            raise InvalidParams(f"a must be a finite real > 0, got {self.a!r}")
        object.__setattr__(self, "a", float(self.a))

    @property
    def name(self) -> str:
        return {-1: "shrinking", 0: "steady", 1: "expanding"}[self.epsilon]

    def isocline(self) -> float | None:
        """Slope ``u`` of the invariant horizontal isocline ``a u + eps/2 = 0``."""
        if self.epsilon == 0:
            return None
        return -self.epsilon / (2.0 * self.a)


@dataclass(frozen=True)
class PhasePoint:
    h: float
    u: float

    def normalized(self, params: SolitonParams) -> NormalizedPoint:
        return NormalizedPoint(params.a * self.h, params.a * self.u)


@dataclass(frozen=True)
class NormalizedPoint:
    v: float
    w: float

    def denormalized(self, params: SolitonParams) -> PhasePoint:
        return PhasePoint(self.v / params.a, self.w / params.a)


class EventKind(str, enum.Enum):
    PINCH_START = "PinchStart"
    PINCH_END = "PinchEnd"
    SMOOTH_CROSSING = "SmoothCrossing"
    ISOCLINE_CROSSING = "IsoclineCrossing"
    EMBEDDABILITY_LOST = "EmbeddabilityLost"
    BLOWUP_GUARD = "BlowUpGuard"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    r: float
    state: PhasePoint

    def to_record(self) -> dict:
        return {"kind": self.kind.value, "r": self.r, "h": self.state.h, "u": self.state.u}


@dataclass(frozen=True)
class ConeAngle:
    """Total angle around a cone point, in radians."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidParams(f"cone angle must be > 0, got {self.alpha!r}")

    @classmethod
    def from_degrees(cls, deg: float) -> ConeAngle:
        return cls(math.radians(deg))

    @property
    def degrees(self) -> float:
        # dividing by pi first keeps alpha = pi/a and 2 pi b exact in degrees
        return self.alpha / math.pi * 180.0

    @property
    def slope(self) -> float:
        """|h'| at the apex."""
        return self.alpha / TWO_PI

    def is_smooth(self, tol: float = SLOPE_TOL) -> bool:
        return abs(self.slope - 1.0) < tol


@dataclass
class Trajectory:
    """Integrated profile sampled at strictly increasing ``r``.

    Samples always carry the geometric radius ``h >= 0`` and its slope
    ``u = dh/dr``.  When the raw solution lives in ``h < 0`` (a pinch left
    with negative slope) it is stored mirrored, ``(h, u) -> (-h, -u)``, and
    ``mirrored`` is set; :meth:`raw_states` undoes that.
    """

    params: SolitonParams
    r: np.ndarray
    h: np.ndarray
    u: np.ndarray
    events: list[Event] = field(default_factory=list)
    z: np.ndarray | None = None
    f: np.ndarray | None = None
    mirrored: bool = False
    termination: str = "span"
    diagnosis: str | None = None

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.h = np.asarray(self.h, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        if not (self.r.shape == self.h.shape == self.u.shape) or self.r.ndim != 1:
            raise ValueError("r, h, u must be 1-D arrays of equal length")
        if self.r.size > 1 and not np.all(np.diff(self.r) > 0):
            raise ValueError("samples must be strictly increasing in r")
        if np.any(self.h < -PINCH_TOL):
            raise ValueError("h must be >= 0 at every sample")
        self.h = np.maximum(self.h, 0.0)
        if self.r.size:
            lo, hi = self.r[0], self.r[-1]
            for ev in self.events:
                if not (lo - 1e-12 <= ev.r <= hi + 1e-12):
                    raise ValueError(f"event at r={ev.r} outside sample range [{lo}, {hi}]")

    def __len__(self):
        return self.r.size

    @property
    def sign(self) -> float:
        return -1.0 if self.mirrored else 1.0

    def raw_states(self) -> tuple[np.ndarray, np.ndarray]:
        """Signed ``(h, u)`` as solutions of the system with the stored ``a``."""
        return self.sign * self.h, self.sign * self.u

    def events_of(self, kind: EventKind) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def at(self, r: float) -> PhasePoint:
        """Cubic Hermite interpolation of ``(h, u)`` at ``r``."""
        if self.r.size == 0 or not (self.r[0] - 1e-12 <= r <= self.r[-1] + 1e-12):
            raise OutOfRange(f"r={r!r} outside trajectory range")
        i = int(np.clip(np.searchsorted(self.r, r) - 1, 0, max(self.r.size - 2, 0)))
        if self.r.size == 1:
            return PhasePoint(float(self.h[0]), float(self.u[0]))
        up = _slope_rate(self.params, self.h, self.u, self.sign)
        h = _hermite(self.r[i], self.r[i + 1], self.h[i], self.h[i + 1], self.u[i], self.u[i + 1], r)
        u = _hermite(self.r[i], self.r[i + 1], self.u[i], self.u[i + 1], up[i], up[i + 1], r)
        return PhasePoint(max(h, 0.0), u)

    def with_extras(self, **kw) -> Trajectory:
        return replace(self, **kw)


def _slope_rate(params, h, u, sign):
    # u' in stored (possibly mirrored) coordinates: mirroring flips the sign of a
    return (sign * params.a * u + params.epsilon / 2.0) * h


def _hermite(r0, r1, y0, y1, d0, d1, r):
    dt = r1 - r0
    t = (r - r0) / dt
    t2, t3 = t * t, t * t * t
    return ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * dt * d0
            + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * dt * d1)


class ClassKind(str, enum.Enum):
    # steady
    FLAT_CYLINDER = "FlatCylinder"
    CIGAR = "Cigar"
    CONE_CIGAR = "ConeCigar"
    CUSP_INCOMPLETE = "CuspIncomplete"
    EXPLODING = "ExplodingRejected"
    BOUNDARY_INCOMPLETE = "BoundaryIncompleteRejected"
    # shrinking
    SPHERICAL = "Spherical"
    FOOTBALL = "Football"
    TEARDROP = "Teardrop"
    GAUSSIAN_PLANE = "GaussianPlane"
    GAUSSIAN_CONE = "GaussianCone"
    OPEN_UNBOUNDED = "OpenUnboundedRejected"
    # expanding
    HYPERBOLIC = "Hyperbolic"
    ALPHA_BETA_CONE = "AlphaBetaCone"
    BLUNT_CONE = "BluntCone"
    CUSPED_CONE = "CuspedCone"
    UNBOUNDED_CURVATURE = "UnboundedCurvatureRejected"


@dataclass(frozen=True)
class SolitonClass:
    """A leaf of the classification together with its cone data.

    ``apex`` is the cone angle at a pinch (``beta`` for expanding cones),
    ``apex2`` the second pinch of a football, ``asymptotic`` the angle of the
    flat cone approached at infinity (``alpha``).
    """

    kind: ClassKind
    epsilon: int
    apex: ConeAngle | None = None
    apex2: ConeAngle | None = None
    asymptotic: ConeAngle | None = None
    curvature_sign: int | None = None
    rejected_reason: str | None = None
    note: str | None = None

    @property
    def rejected(self) -> bool:
        return self.rejected_reason is not None

    def to_record(self, a: float | None = None, b: float | None = None) -> dict:
        rec = {"epsilon": self.epsilon, "a": a, "b": b, "class": self.kind.value}
        if self.kind == ClassKind.ALPHA_BETA_CONE or self.epsilon == 1:
            rec["alpha_deg"] = self.asymptotic.degrees if self.asymptotic else None
            rec["beta_deg"] = self.apex.degrees if self.apex else None
        else:
            rec["alpha1_deg"] = self.apex.degrees if self.apex else None
            if self.apex2 is not None:
                rec["alpha2_deg"] = self.apex2.degrees
        rec["curvature_sign"] = self.curvature_sign
        if self.rejected_reason is not None:
            rec["rejected_reason"] = self.rejected_reason
        if self.note is not None:
            rec["note"] = self.note
        return rec


def curvature(params: SolitonParams, u: float) -> float:
    """Gaussian curvature ``K = -h''/h = -(a u + eps/2)``."""
    return -(params.a * u + params.epsilon / 2.0)


def cone_angle_from_slope(u0: float, tol: float = SLOPE_TOL) -> ConeAngle:
    if abs(u0) < tol:
        raise ZeroSlope(f"slope {u0!r} at a zero of h is not a cone point")
    return ConeAngle(TWO_PI * abs(u0))


def potential_profile(traj: Trajectory, f0: float = 0.0) -> Trajectory:
    """Fill ``f`` by integrating ``f' = a h`` along the samples.

    Uses the Hermite-corrected trapezoid rule (fourth order, exact for cubics),
    the same interpolant as the integrator's dense output.  For a mirrored
    trajectory the raw radius is ``-h``, so ``f`` decreases away from the pinch.
    """
    if len(traj) < 2:
        raise ValueError("potential_profile needs at least 2 samples")
    a = traj.params.a * traj.sign
    f = f0 + a * _cumulative_hermite(traj.r, traj.h, traj.u)
    return traj.with_extras(f=f)


def _cumulative_hermite(r, y, dy):
    dr = np.diff(r)
    pieces = dr * (y[:-1] + y[1:]) / 2.0 + dr * dr * (dy[:-1] - dy[1:]) / 12.0
    return np.concatenate(([0.0], np.cumsum(pieces)))


def geometry_report(traj: Trajectory, r: float) -> tuple[float, float]:
    """Parallel perimeter ``2 pi h(r)`` and the area swept from the first sample to ``r``."""
    p = traj.at(r)
    i = int(np.searchsorted(traj.r, r, side="right"))
    rs = np.append(traj.r[:i], r)
    hs = np.append(traj.h[:i], p.h)
    us = np.append(traj.u[:i], p.u)
    if rs.size >= 2 and rs[-1] == rs[-2]:
        rs, hs, us = rs[:-1], hs[:-1], us[:-1]
    area = TWO_PI * _cumulative_hermite(rs, hs, us)[-1] if rs.size > 1 else 0.0
    return TWO_PI * p.h, float(area)

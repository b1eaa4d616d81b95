"""Expanding solitons (eps = +1): the saddle at the origin, its stable separatrix, and the cone families.

In normalized coordinates ``(v, w) = (a h, a u)`` the system reads
``v' = w, w' = (w + 1/2) v`` with the *same* variable ``r``, so every
normalized quantity below (rates, ratios) is independent of ``a``.  The
linearization at the origin is ``M = [[0, 1], [1/2, 0]]``.
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
from .errors import DriftExceeded, InvalidParams, InvalidPinchSlope, RegimeNotReached
from .ode import FirstIntegralReport, IntegratorControls, integrate

SQRT2 = math.sqrt(2.0)
SEPARATRIX = "separatrix"
ISOCLINE = "isocline"

PLANES_NOTE = (
    "the universal cover (theta ranging over the reals) of the same profile is a "
    "flat-hyperbolic soliton plane; not computed separately"
)


@dataclass(frozen=True)
class SaddleData:
    """Eigendata of ``M = [[0, 1], [1/2, 0]]``; the first pair is unstable."""

    matrix: tuple[tuple[float, float], tuple[float, float]] = ((0.0, 1.0), (0.5, 0.0))
    eigenvalues: tuple[float, float] = (1.0 / SQRT2, -1.0 / SQRT2)
    eigenvectors: tuple[tuple[float, float], tuple[float, float]] = ((SQRT2, 1.0), (-SQRT2, 1.0))

    @property
    def determinant(self) -> float:
        (m00, m01), (m10, m11) = self.matrix
        return m00 * m11 - m01 * m10

    def residuals(self) -> list[float]:
        """``|M x - lambda x|`` (max norm) for each eigenpair."""
        (m00, m01), (m10, m11) = self.matrix
        out = []
        for lam, (x, y) in zip(self.eigenvalues, self.eigenvectors):
            out.append(max(abs(m00 * x + m01 * y - lam * x), abs(m10 * x + m11 * y - lam * y)))
        return out


def saddle_linearization() -> SaddleData:
    return SaddleData()


@dataclass(frozen=True)
class SeparatrixResult:
    """The stable separatrix, sampled from the cone end (``r -> -inf``) to the cusp end.

    ``r`` is anchored so that ``v ~ e^(-r/sqrt 2)`` on the cusp end, which puts
    the cone-end asymptote at ``v ~ -r/2 + asym_cone_const``.
    ``asym_cusp_const`` is the limit of ``v e^(r/sqrt 2)`` over the last decade.
    """

    trajectory: Trajectory
    delta: float
    asym_cone_const: float
    asym_cusp_const: float
    cusp_spread: float
    first_integral: FirstIntegralReport
    richardson_cone_diff: float | None = None


def _launch(delta: float) -> tuple[float, float]:
    # stable eigenvector (-sqrt2, 1), oriented into v > 0
    s3 = math.sqrt(3.0)
    return delta * SQRT2 / s3, -delta / s3


def _fit_linear(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    slope, icpt = np.linalg.lstsq(A, y, rcond=None)[0]
    return float(slope), float(icpt)


def _separatrix_arm(a: float, delta: float, r_extent: float, controls: IntegratorControls):
    params = SolitonParams(1, a)
    v0, w0 = _launch(delta)
    r_launch = -SQRT2 * math.log(v0)
    seed = PhasePoint(v0 / a, w0 / a)
    span = r_extent + r_launch
    # near the saddle h is O(delta): the absolute tolerance must scale with it
    atol = min(controls.abs_tol, 1e-6 * delta / a)
    controls = IntegratorControls(controls.rel_tol, atol, controls.max_step, controls.max_r_span, controls.blowup_guard)
    ctl = IntegratorControls(controls.rel_tol, atol, controls.max_step, span, controls.blowup_guard)
    back, rep_b = integrate(params, seed, r_launch, -1, ctl, stop_at_pinch=False, isocline_events=False, pinch_tol=0.0)
    fwd_ctl = IntegratorControls(controls.rel_tol, atol, controls.max_step, 40.0, controls.blowup_guard)
    fwd, rep_f = integrate(params, seed, r_launch, 1, fwd_ctl, isocline_events=False, pinch_tol=0.0)
    # roundoff along the unstable direction eventually dominates; keep the
    # forward samples that still sit on the stable eigenline
    vf, wf = a * fwd.h, a * fwd.u
    with np.errstate(divide="ignore", invalid="ignore"):
        on_line = np.abs(wf / vf * SQRT2 + 1.0) < 1e-3
    stop = int(np.argmin(on_line)) if not np.all(on_line) else len(on_line)
    stop = max(stop, 2)
    r = np.concatenate((back.r, fwd.r[1:stop]))
    h = np.concatenate((back.h, fwd.h[1:stop]))
    u = np.concatenate((back.u, fwd.u[1:stop]))
    traj = Trajectory(params, r, h, u, termination="separatrix",
                      diagnosis="stable manifold of the saddle at the origin")
    H0 = rep_b.initial_value
    drift = max(rep_b.max_drift, rep_f.max_drift)
    return traj, FirstIntegralReport(H0, drift, drift / max(abs(H0), 1.0)), r_launch


def _cone_const(traj: Trajectory, r_extent: float) -> float:
    v = traj.params.a * traj.h
    sel = traj.r <= traj.r[0] + 0.1 * r_extent
    return float(np.mean(v[sel] + traj.r[sel] / 2.0))


def compute_separatrix(
    a: float = 1.0,
    delta: float = 1e-8,
    r_extent: float = 200.0,
    controls: IntegratorControls | None = None,
    richardson: bool = True,
) -> SeparatrixResult:
    """Shoot the stable separatrix from ``delta`` along the sinking eigenvector.

    Integrates backward to ``r = -r_extent`` for the cone end and forward for
    the cusp end.  With ``richardson`` the launch is repeated at ``delta/10``
    and the change in the cone constant is recorded.
    """
    if not 0 < delta <= 1e-6:
        raise InvalidParams(f"delta must lie in (0, 1e-6], got {delta!r}")
    if not r_extent > 0:
        raise InvalidParams("r_extent must be positive")
    controls = controls or IntegratorControls()
    traj, report, r_launch = _separatrix_arm(a, delta, r_extent, controls)
    if abs(report.initial_value) + report.max_drift > 1e-7:
        raise DriftExceeded(abs(report.initial_value) + report.max_drift, 1e-7)

    cone = _cone_const(traj, r_extent)
    tail = traj.r >= r_launch
    v_tail = a * traj.h[tail]
    scaled = v_tail * np.exp(traj.r[tail] / SQRT2)
    last = scaled[traj.r[tail] >= traj.r[tail][0] + 0.9 * (traj.r[tail][-1] - traj.r[tail][0])]
    cusp = float(np.mean(last))
    spread = float((last.max() - last.min()) / abs(cusp))

    diff = None
    if richardson:
        fine, _, _ = _separatrix_arm(a, delta / 10.0, r_extent, controls)
        diff = abs(_cone_const(fine, r_extent) - cone)
    return SeparatrixResult(traj, delta, cone, cusp, spread, report, diff)


def classify_expanding(a: float, b: float | str) -> SolitonClass:
    """Classify the expanding orbit through the pinch ``(0, b)`` (or a flagged special orbit).

    No integration is needed: every axis crossing with ``b > 0`` lies above
    the separatrix, and the cone data follow from ``alpha = pi/a`` and
    ``beta = -2 pi b``.
    """
    SolitonParams(1, a)
    alpha = ConeAngle(math.pi / a)
    iso = -1.0 / (2.0 * a)
    if b == ISOCLINE or (isinstance(b, (int, float)) and abs(b - iso) < SLOPE_TOL):
        if abs(a - 0.5) < 1e-12:
            return SolitonClass(ClassKind.GAUSSIAN_PLANE, 1, apex=ConeAngle(TWO_PI), curvature_sign=0)
        return SolitonClass(ClassKind.GAUSSIAN_CONE, 1, apex=alpha, asymptotic=alpha, curvature_sign=0)
    if b == SEPARATRIX or (isinstance(b, (int, float)) and b == 0):
        return SolitonClass(ClassKind.CUSPED_CONE, 1, asymptotic=alpha, curvature_sign=-1, note=PLANES_NOTE)
    if isinstance(b, str):
        raise InvalidPinchSlope(f"unknown flag {b!r}")
    if not math.isfinite(b):
        raise InvalidPinchSlope(f"pinch slope must be finite, got {b!r}")
    if b > 0:
        return SolitonClass(
            ClassKind.UNBOUNDED_CURVATURE, 1, apex=ConeAngle(TWO_PI * b),
            rejected_reason="above the separatrix: u grows without bound, curvature not bounded below",
        )
    beta = ConeAngle(-TWO_PI * b)
    sign = 1 if alpha.alpha < beta.alpha else -1
    if abs(b + 1.0) < SLOPE_TOL:
        return SolitonClass(ClassKind.BLUNT_CONE, 1, apex=ConeAngle(TWO_PI), asymptotic=alpha, curvature_sign=sign)
    return SolitonClass(ClassKind.ALPHA_BETA_CONE, 1, apex=beta, asymptotic=alpha, curvature_sign=sign)


def _ends(traj: Trajectory, tail_fraction: float):
    span = traj.r[-1] - traj.r[0]
    first = traj.r <= traj.r[0] + tail_fraction * span
    last = traj.r >= traj.r[-1] - tail_fraction * span
    return first, last


def asymptotics_report(
    traj: Trajectory,
    parabola_w_min: float = 50.0,
    cone_v_min: float = 5.0,
    cusp_v_max: float = 1e-3,
    tail_fraction: float = 0.1,
) -> dict:
    """Measure the asymptotic regimes an expanding trajectory reaches at either end.

    Returns ``{"parabola_ratio", "cone_slope_ratio", "cusp_rate"}``; entries
    whose regime is not reached are ``None``.

    * ``parabola_ratio``: ``v^2/(2w)`` at the end where ``w >= parabola_w_min``.
    * ``cone_slope_ratio``: ``u / (-1/(2a))`` (raw sign) at the end where
      ``w < 0`` and ``v >= cone_v_min``.
    * ``cusp_rate``: ``-d ln v / dr`` fitted over the decaying end samples with
      ``0 < v < cusp_v_max`` (normalized ``r``, which equals ``r``).

    Raises
    ------
    RegimeNotReached
        If no end of the trajectory is in any asymptotic regime.
    """
    if traj.params.epsilon != 1:
        raise InvalidParams("asymptotics_report applies to expanding trajectories")
    if len(traj) < 4:
        raise RegimeNotReached("trajectory too short")
    a = traj.params.a
    h_raw, u_raw = traj.raw_states()
    out = {"parabola_ratio": None, "cone_slope_ratio": None, "cusp_rate": None}
    for idx in (0, -1):
        v, w = a * h_raw[idx], a * u_raw[idx]
        if w >= parabola_w_min:
            out["parabola_ratio"] = float(v * v / (2.0 * w))
        if w < 0 and abs(v) >= cone_v_min and out["cone_slope_ratio"] is None:
            out["cone_slope_ratio"] = float(u_raw[idx] / (-1.0 / (2.0 * a)))

    v = a * traj.h
    cusp = (v > 0) & (v < cusp_v_max)
    if cusp.sum() >= 4:
        r_c, v_c = traj.r[cusp], v[cusp]
        # fit on the last decade of the regime, at the decaying end
        if cusp[-1]:
            sel = r_c >= r_c[-1] - tail_fraction * (traj.r[-1] - traj.r[0])
            sel &= r_c >= r_c[0]
            slope, _ = _fit_linear(r_c[sel], np.log(v_c[sel]))
            out["cusp_rate"] = -slope
        elif cusp[0]:
            sel = r_c <= r_c[0] + tail_fraction * (traj.r[-1] - traj.r[0])
            slope, _ = _fit_linear(r_c[sel], np.log(v_c[sel]))
            out["cusp_rate"] = slope
    if all(val is None for val in out.values()):
        raise RegimeNotReached("no end of the trajectory has entered an asymptotic regime")
    return out

"""Adaptive integration of the planar soliton system ``h' = u, u' = (a u + eps/2) h``.

Dormand-Prince 5(4) with PI step control, cubic Hermite dense output and
event localization (bisection on the interpolant, then Newton polishing with
exact re-steps).  The system is 2-3 dimensional, so the stepper works on plain
Python floats; numpy only appears when samples are handed back.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .domain import (
    PINCH_TOL,
    SLOPE_TOL,
    Event,
    EventKind,
    PhasePoint,
    SolitonParams,
    Trajectory,
)
from .errors import EmbeddingLost, InvalidInit, OnSingularLocus, SolitonLabError, StepSizeUnderflow

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_EMBED_SLACK = 1e-9


@dataclass(frozen=True)
class IntegratorControls:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 0.25
    max_r_span: float = 100.0
    blowup_guard: float = 1e6

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "max_r_span", "blowup_guard"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class FirstIntegralReport:
    initial_value: float
    max_drift: float
    relative_drift: float
    defined: bool = True


def rhs(params: SolitonParams, p: PhasePoint) -> tuple[float, float]:
    return p.u, (params.a * p.u + params.epsilon / 2.0) * p.h


def first_integral(params: SolitonParams, p: PhasePoint) -> float:
    """Case-appropriate conserved quantity; its level sets are the orbits."""
    a, eps = params.a, params.epsilon
    if eps == 0:
        return a * p.h * p.h / 2.0 - p.u
    v, w = a * p.h, a * p.u
    arg = 2.0 * w + eps  # 2w - 1 when shrinking, 2w + 1 when expanding
    if abs(arg) < 1e-14:
        raise OnSingularLocus(f"({p.h}, {p.u}) lies on the invariant isocline")
    return v * v - 2.0 * w + eps * math.log(abs(arg))


def first_integral_array(params: SolitonParams, h, u) -> np.ndarray:
    a, eps = params.a, params.epsilon
    h, u = np.asarray(h, dtype=float), np.asarray(u, dtype=float)
    if eps == 0:
        return a * h * h / 2.0 - u
    v, w = a * h, a * u
    arg = np.abs(2.0 * w + eps)
    if np.any(arg < 1e-14):
        raise OnSingularLocus("trajectory touches the invariant isocline")
    return v * v - 2.0 * w + eps * np.log(arg)


def drift_report(params: SolitonParams, h, u, log_floor: float = 1e-6) -> FirstIntegralReport:
    """Drift of the first integral over signed samples, relative to ``max(|H0|, 1)``.

    Samples with ``|2w + eps| < log_floor`` are skipped: there the logarithm
    amplifies roundoff in ``w`` by ``1/|2w + eps|`` and H is not measurable.
    """
    h, u = np.asarray(h, dtype=float), np.asarray(u, dtype=float)
    if params.epsilon != 0:
        keep = np.abs(2.0 * params.a * u + params.epsilon) >= log_floor
        h, u = h[keep], u[keep]
    if h.size == 0:
        return FirstIntegralReport(math.nan, 0.0, 0.0, defined=False)
    H = first_integral_array(params, h, u)
    drift = float(np.max(np.abs(H - H[0])))
    return FirstIntegralReport(float(H[0]), drift, drift / max(abs(float(H[0])), 1.0))


def trajectory_drift(traj: Trajectory) -> FirstIntegralReport:
    h, u = traj.raw_states()
    return drift_report(traj.params, h, u)


# -- stepper ---------------------------------------------------------------


def _dopri_step(fun, y, k1, dt):
    n = len(y)
    ks = [k1]
    for i in range(1, 7):
        row = _A[i]
        yi = [y[j] + dt * sum(row[m] * ks[m][j] for m in range(i) if row[m]) for j in range(n)]
        ks.append(fun(yi))
        if i == 6:
            y_new = yi
    err = [dt * sum(_E[m] * ks[m][j] for m in range(7) if _E[m]) for j in range(n)]
    return y_new, ks[6], err


def _hermite(dt, y0, y1, f0, f1, t):
    t2, t3 = t * t, t * t * t
    h00, h10, h01, h11 = 2 * t3 - 3 * t2 + 1, t3 - 2 * t2 + t, -2 * t3 + 3 * t2, t3 - t2
    return [h00 * a + h10 * dt * c + h01 * b + h11 * dt * d for a, b, c, d in zip(y0, y1, f0, f1)]


@dataclass
class _EventSpec:
    kind: EventKind
    g: Callable[[list], float]
    dg: Callable[[list, list], float]
    terminal: bool


@dataclass
class _Run:
    s: list = field(default_factory=list)
    y: list = field(default_factory=list)
    events: list = field(default_factory=list)  # (kind, s, y)
    termination: str = "span"
    diagnosis: str | None = None


def _locate(fun, spec, s0, y0, f0, s1, y1, f1):
    """Root of ``spec.g`` inside one accepted step, accurate to ~1e-12 in s."""
    dt = s1 - s0
    g0 = spec.g(y0)
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        gm = spec.g(_hermite(dt, y0, y1, f0, f1, mid))
        if (gm > 0) == (g0 > 0) and gm != 0:
            lo = mid
        else:
            hi = mid
        if (hi - lo) * abs(dt) < 1e-15:
            break
    tau = 0.5 * (lo + hi) * dt
    # polish against exact re-steps from the step start
    for _ in range(4):
        if tau <= 0:
            break
        y_t, _, _ = _dopri_step(fun, y0, f0, tau)
        d = spec.dg(y_t, fun(y_t))
        if d == 0 or not math.isfinite(d):
            break
        corr = spec.g(y_t) / d
        new_tau = tau - corr
        if not (0.0 < new_tau <= dt * (1 + 1e-12)):
            break
        tau = new_tau
        if abs(corr) < 1e-15:
            break
    y_t, _, _ = _dopri_step(fun, y0, f0, tau) if tau > 0 else (list(y0), None, None)
    return s0 + tau, y_t


def _drive(fun, y0, span, controls, events=(), window=None, magnitude=None):
    """Integrate ``y' = fun(y)`` over ``s in [0, span]`` with event detection.

    ``magnitude(y)`` feeds the blow-up guard, ``window(y)`` is False once the
    state has left the region of interest.
    """
    rtol, atol = controls.rel_tol, controls.abs_tol
    run = _Run(s=[0.0], y=[list(y0)])
    y = list(y0)
    f = fun(y)
    s = 0.0
    scale = max(max(abs(v) for v in y), atol / rtol)
    dnorm = max(abs(v) for v in f)
    dt = min(controls.max_step, span, 1e-2 if dnorm == 0 else 1e-2 * max(scale, 1e-3) / dnorm)
    dt = max(dt, 1e-6 * min(span, 1.0))
    err_prev = 1e-4
    mags = []
    while s < span:
        dt = min(dt, span - s, controls.max_step)
        y_new, f_new, err = _dopri_step(fun, y, f, dt)
        try:
            en = math.sqrt(
                sum((e / (atol + rtol * max(abs(p), abs(q)))) ** 2 for e, p, q in zip(err, y, y_new)) / len(y)
            )
        except OverflowError:
            en = math.inf
        if not math.isfinite(en):
            en = 1e10
        if en > 1.0:
            dt *= max(0.2, 0.9 * en ** -0.2)
            if dt < 1e-14 * max(1.0, abs(s)):
                if len(mags) >= 3 and mags[-1] > mags[-3] and mags[-1] > 10:
                    run.termination = "blowup"
                    run.diagnosis = "incomplete metric: finite-r blow-up"
                    run.events.append((EventKind.BLOWUP_GUARD, s, list(y)))
                    return run
                raise StepSizeUnderflow(s, dt)
            continue
        s_new = s + dt
        hits = []
        for spec in events:
            g_old, g_new = spec.g(y), spec.g(y_new)
            if g_old != 0 and (g_old > 0) != (g_new > 0):
                s_ev, y_ev = _locate(fun, spec, s, y, f, s_new, y_new, f_new)
                hits.append((s_ev, spec, y_ev))
        hits.sort(key=lambda t: t[0])
        for s_ev, spec, y_ev in hits:
            run.events.append((spec.kind, s_ev, y_ev))
            if spec.terminal:
                if s_ev > run.s[-1]:
                    run.s.append(s_ev)
                    run.y.append(y_ev)
                run.termination = spec.kind.value
                return run
        s, y, f = s_new, y_new, f_new
        run.s.append(s)
        run.y.append(list(y))
        if magnitude is not None:
            mags.append(magnitude(y))
            if mags[-1] > controls.blowup_guard:
                run.termination = "blowup"
                run.diagnosis = "incomplete metric: finite-r blow-up"
                run.events.append((EventKind.BLOWUP_GUARD, s, list(y)))
                return run
        if window is not None and not window(y):
            run.termination = "window"
            return run
        fac = 0.9 * max(en, 1e-10) ** (-0.7 / 5) * err_prev ** (0.4 / 5)
        dt *= min(5.0, max(0.2, fac))
        err_prev = max(en, 1e-4)
    return run


def _exp(x):
    return math.exp(x) if x < 700.0 else math.inf


class _LogSystem:
    """The soliton system in ``(h, l)`` with ``l = ln|u + eps/(2a)|``.

    The distance ``d = u + eps/(2a)`` to the invariant isocline obeys
    ``d' = a h d``: it never changes sign and ``l' = a h``.  Error control on
    ``l`` keeps orbits that hug the isocline relatively accurate, which the
    logarithmic first integrals need.
    """

    def __init__(self, params: SolitonParams, d0: float, direction: int, with_height: bool):
        self.a = params.a
        self.eps = params.epsilon
        self.shift = params.epsilon / (2.0 * params.a)
        self.sigma = 1.0 if d0 > 0 else -1.0
        self.dir = float(direction)
        self.with_height = with_height

    def u(self, y):
        return self.sigma * _exp(y[1]) - self.shift

    def __call__(self, y):
        u = self.u(y)
        out = [self.dir * u, self.dir * self.a * y[0]]
        if self.with_height:
            out.append(self.dir * math.sqrt(max(0.0, 1.0 - u * u)))
        return out

    def du(self, y, dy):
        return self.sigma * _exp(y[1]) * dy[1]

    def first_integral(self, h, l):
        a, eps = self.a, self.eps
        d = self.sigma * np.exp(l)
        if eps == 0:
            return a * h * h / 2.0 - d
        w = a * d - eps / 2.0
        return (a * h) ** 2 - 2.0 * w + eps * (math.log(2.0 * a) + l)


def _analytic(params, init, r0, direction, span, stop_at_pinch):
    """Orbits that are straight lines: the isocline, or a steady fixed point."""
    slope = 0.0 if params.epsilon == 0 else params.isocline()
    r_end = span
    if stop_at_pinch and direction * slope < 0 and init.h > 0:
        r_end = min(span, init.h / abs(slope))
    n = max(2, int(math.ceil(r_end / 0.05)) + 1)
    s = np.linspace(0.0, r_end, n)
    h = init.h + direction * slope * s
    r = r0 + direction * s
    u = np.full_like(r, slope)
    if direction == -1:
        r, h = r[::-1], h[::-1]
    events = []
    if init.h == 0.0 and slope != 0.0:
        events.append(Event(EventKind.PINCH_START, r0, PhasePoint(0.0, abs(slope))))
    mirrored = bool(np.any(h < -PINCH_TOL))
    sign = -1.0 if mirrored else 1.0
    term = "analytic"
    if r_end < span:
        end_r = r0 + direction * r_end
        events.append(Event(EventKind.PINCH_END, end_r, PhasePoint(0.0, slope)))
        term = "pinch"
        h[-1 if direction == 1 else 0] = 0.0
    diag = "fixed point: constant h" if slope == 0.0 else "invariant isocline: exact linear orbit"
    traj = Trajectory(params, r, sign * h, sign * u, events=sorted(events, key=lambda e: e.r),
                      mirrored=mirrored, termination=term, diagnosis=diag)
    return traj, FirstIntegralReport(math.nan, 0.0, 0.0, defined=False)


def integrate(
    params: SolitonParams,
    init: PhasePoint,
    r0: float = 0.0,
    direction: int = 1,
    controls: IntegratorControls | None = None,
    *,
    window: tuple[float, float, float, float] | None = None,
    with_height: bool = False,
    stop_at_pinch: bool = True,
    isocline_events: bool = True,
    pinch_tol: float = PINCH_TOL,
) -> tuple[Trajectory, FirstIntegralReport]:
    """Integrate from ``init`` at ``r0`` in ``direction`` (+1 forward, -1 backward).

    Stops at the first of: the next zero of ``h`` (``PinchEnd``), the blow-up
    guard, leaving ``window = (hmin, hmax, umin, umax)`` (raw coordinates), or
    ``controls.max_r_span``.  With ``with_height`` the embedding height
    ``z' = sqrt(1 - u^2)`` is integrated alongside and ``|u| > 1`` raises
    :class:`EmbeddingLost`.  Seeds on an invariant line (the isocline, or the
    steady fixed line ``u = 0``) are emitted analytically.  A seed with
    ``h < pinch_tol`` is treated as a pinch; pass ``pinch_tol=0`` to start
    from a genuinely tiny radius (saddle launches).
    """
    controls = controls or IntegratorControls()
    if direction not in (1, -1):
        raise InvalidInit("direction must be +1 or -1")
    if not (math.isfinite(init.h) and math.isfinite(init.u)):
        raise InvalidInit(f"non-finite initial state {init}")
    if init.h < 0:
        raise InvalidInit(f"initial h must be >= 0, got {init.h}")
    h0 = 0.0 if init.h < pinch_tol else float(init.h)
    if with_height and abs(init.u) > 1 + _EMBED_SLACK:
        raise EmbeddingLost(r0, init.u)

    d0 = init.u + params.epsilon / (2.0 * params.a)
    if abs(d0) < 1e-15 * max(1.0, abs(init.u)):
        traj, rep = _analytic(params, PhasePoint(h0, init.u), r0, direction, controls.max_r_span, stop_at_pinch)
        if with_height:
            zs = np.sqrt(max(0.0, 1.0 - init.u ** 2)) * (traj.r - r0)
            traj = traj.with_extras(z=zs)
        return traj, rep

    fun = _LogSystem(params, d0, direction, with_height)
    specs = []
    if stop_at_pinch:
        specs.append(_EventSpec(EventKind.PINCH_END, lambda y: y[0], lambda y, d: d[0], True))
    if isocline_events and params.epsilon != 0:
        specs.append(_EventSpec(EventKind.ISOCLINE_CROSSING, fun.u, fun.du, False))
    if with_height:
        lim = 1.0 + _EMBED_SLACK
        specs.append(_EventSpec(
            EventKind.EMBEDDABILITY_LOST,
            lambda y: lim - abs(fun.u(y)),
            lambda y, d: -math.copysign(1.0, fun.u(y)) * fun.du(y, d),
            True,
        ))
    win = None
    if window is not None:
        hmin, hmax, umin, umax = window
        win = lambda y: hmin - 1e-12 <= y[0] <= hmax and umin <= fun.u(y) <= umax  # noqa: E731

    y0 = [h0, math.log(abs(d0))] + ([0.0] if with_height else [])
    run = _drive(fun, y0, controls.max_r_span, controls, specs, win,
                 magnitude=lambda y: max(abs(y[0]), abs(fun.u(y))))

    if run.termination == EventKind.EMBEDDABILITY_LOST.value:
        s_ev, y_ev = next((s, y) for k, s, y in run.events if k == EventKind.EMBEDDABILITY_LOST)
        raise EmbeddingLost(r0 + direction * s_ev, fun.u(y_ev))

    ys = np.array(run.y)
    s = np.array(run.s)
    if run.termination == EventKind.PINCH_END.value:
        ys[-1, 0] = 0.0
    h_raw, ell = ys[:, 0], ys[:, 1]
    u_raw = fun.sigma * np.exp(np.minimum(ell, 700.0)) - fun.shift
    u_raw[0] = init.u
    H = fun.first_integral(h_raw, ell)
    drift = float(np.max(np.abs(H - H[0])))
    report = FirstIntegralReport(float(H[0]), drift, drift / max(abs(float(H[0])), 1.0))

    r = r0 + direction * s
    nz = np.flatnonzero(np.abs(h_raw) > min(pinch_tol, PINCH_TOL))
    mirrored = bool(nz.size and h_raw[nz[0]] < 0)
    sign = -1.0 if mirrored else 1.0

    events = []
    if h0 == 0.0:
        events.append(Event(EventKind.PINCH_START, r0, PhasePoint(0.0, sign * init.u)))
    for kind, s_ev, y_ev in run.events:
        h_ev = 0.0 if kind == EventKind.PINCH_END else abs(y_ev[0])
        events.append(Event(kind, r0 + direction * s_ev, PhasePoint(h_ev, sign * fun.u(y_ev))))
    for ev in list(events):
        if ev.kind in (EventKind.PINCH_START, EventKind.PINCH_END) and abs(abs(ev.state.u) - 1.0) < SLOPE_TOL:
            events.append(Event(EventKind.SMOOTH_CROSSING, ev.r, ev.state))

    z = ys[:, 2] if with_height else None
    if direction == -1:
        r, h_raw, u_raw = r[::-1], h_raw[::-1], u_raw[::-1]
        z = z[::-1] if z is not None else None
    events.sort(key=lambda e: e.r)
    termination = "pinch" if run.termination == EventKind.PINCH_END.value else run.termination
    traj = Trajectory(
        params=params,
        r=r,
        h=sign * h_raw,
        u=sign * u_raw,
        events=events,
        z=z,
        mirrored=mirrored,
        termination=termination,
        diagnosis=run.diagnosis,
    )
    return traj, report


def isocline_orbit(params: SolitonParams, init: PhasePoint, r0: float, r1: float, n: int = 201) -> Trajectory:
    """Exact linear orbit ``h = h0 + u_iso (r - r0)`` on the invariant isocline."""
    u_iso = params.isocline()
    if u_iso is None:
        raise ValueError("steady systems have no invariant isocline")
    r = np.linspace(r0, r1, n)
    h = init.h + u_iso * (r - r0)
    keep = h >= -PINCH_TOL
    r, h = r[keep], np.maximum(h[keep], 0.0)
    return Trajectory(params, r, h, np.full_like(r, u_iso), termination="analytic")


def on_isocline(params: SolitonParams, p: PhasePoint, tol: float = 1e-14) -> bool:
    iso = params.isocline()
    return iso is not None and abs(params.a * p.u + params.epsilon / 2.0) < tol * max(1.0, params.a)


# -- phase portraits -------------------------------------------------------


@dataclass
class PortraitEntry:
    seed: PhasePoint
    trajectory: Trajectory | None
    report: FirstIntegralReport | None
    error: str | None = None


def _join(back: Trajectory | None, fwd: Trajectory | None) -> Trajectory | None:
    parts = [t for t in (back, fwd) if t is not None and len(t)]
    if not parts:
        return None
    if len(parts) == 1:
        return parts[0]
    b, f = parts
    return Trajectory(
        params=f.params,
        r=np.concatenate((b.r, f.r[1:])),
        h=np.concatenate((b.h, f.h[1:])),
        u=np.concatenate((b.u, f.u[1:])),
        events=sorted(b.events + f.events, key=lambda e: e.r),
        termination=f"{b.termination}|{f.termination}",
        diagnosis=f.diagnosis or b.diagnosis,
    )


def _portrait_seed(args):
    params, seed, controls, window = args
    try:
        if on_isocline(params, seed):
            iso = params.isocline()
            hmax = window[1]
            ends = sorted((-seed.h / iso, (hmax - seed.h) / iso))
            r_lo = max(ends[0], -controls.max_r_span)
            r_hi = min(ends[1], controls.max_r_span)
            start = PhasePoint(seed.h + iso * r_lo, seed.u)  # the seed itself sits at r = 0
            traj = isocline_orbit(params, start, r_lo, r_hi, 401)
            return PortraitEntry(seed, traj, FirstIntegralReport(math.nan, 0.0, 0.0, defined=False))
        parts = []
        for direction in (-1, 1):
            if seed.h == 0.0 and direction * seed.u <= 0:
                continue  # that branch lies in h < 0, the mirror image
            t, _ = integrate(params, seed, 0.0, direction, controls, window=window)
            parts.append(t)
        back = parts[0] if len(parts) == 2 or (parts and parts[0].r[0] < 0) else None
        fwd = parts[-1] if parts and parts[-1] is not back else None
        traj = _join(back, fwd)
        rep = trajectory_drift(traj) if traj is not None else None
        return PortraitEntry(seed, traj, rep)
    except SolitonLabError as exc:
        return PortraitEntry(seed, None, None, error=f"{type(exc).__name__}: {exc}")


def worker_count() -> int:
    env = os.environ.get("SOLITON_LAB_THREADS")
    cpus = os.cpu_count() or 1
    if env:
        try:
            return max(1, min(int(env), cpus))
        except ValueError:
            pass
    return 1


def sample_portrait(
    params: SolitonParams,
    grid: Sequence[PhasePoint],
    controls: IntegratorControls | None = None,
    window: tuple[float, float, float, float] = (0.0, 4.0, -3.0, 3.0),
    workers: int | None = None,
) -> list[PortraitEntry]:
    """Integrate every seed both ways until it leaves ``window``; order follows ``grid``.

    Per-seed failures are captured in :attr:`PortraitEntry.error`.
    """
    controls = controls or IntegratorControls(max_r_span=20.0)
    jobs = [(params, p, controls, window) for p in grid]
    if not jobs:
        return []
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(jobs) > 8:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_portrait_seed, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [_portrait_seed(j) for j in jobs]

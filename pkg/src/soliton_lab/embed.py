"""Rotational embeddings ``(h cos t, h sin t, z)`` in R^3 with ``dr^2 = dh^2 + dz^2``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import PINCH_TOL, PhasePoint, SolitonParams, Trajectory, _hermite
from .errors import EmbeddingLost, InvalidParams
from .ode import IntegratorControls, integrate

_SLACK = 1e-9


@dataclass
class Mesh:
    """Surface of revolution: ``rings`` meridian samples by ``sectors`` angular samples.

    A ring whose radius is below the pinch tolerance is a single apex vertex
    joined to its neighbour by a triangle fan, so the vertex count is
    ``(rings - n_apex) * sectors + n_apex``.  Face indices are 0-based.
    """

    vertices: np.ndarray
    faces: list[tuple[int, ...]] = field(default_factory=list)
    rings: int = 0
    sectors: int = 0
    ring_start: list[int] = field(default_factory=list)
    ring_r: np.ndarray | None = None

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)

    @property
    def n_apex(self) -> int:
        if not self.ring_start:
            return 0
        sizes = np.diff(self.ring_start + [len(self.vertices)])
        return int(np.sum(sizes == 1))

    def ring(self, i: int) -> np.ndarray:
        ends = self.ring_start + [len(self.vertices)]
        return self.vertices[ends[i]:ends[i + 1]]

    @classmethod
    def empty(cls) -> Mesh:
        return cls(np.zeros((0, 3)))


def revolve(h, z, sectors: int, r=None) -> Mesh:
    """Mesh of the profile curve ``(h_i, z_i)`` revolved about the z axis."""
    h = np.asarray(h, dtype=float)
    z = np.asarray(z, dtype=float)
    if h.shape != z.shape or h.ndim != 1:
        raise InvalidParams("h and z must be 1-D arrays of equal length")
    if h.size < 2:
        raise InvalidParams("rings must be >= 2")
    if sectors < 3:
        raise InvalidParams("sectors must be >= 3")
    if np.any(~np.isfinite(h)) or np.any(~np.isfinite(z)):
        raise InvalidParams("profile contains non-finite values")
    theta = 2.0 * math.pi * np.arange(sectors) / sectors
    ct, st = np.cos(theta), np.sin(theta)
    verts, starts = [], []
    n = 0
    for hi, zi in zip(h, z):
        starts.append(n)
        if hi < PINCH_TOL:
            verts.append(np.array([[0.0, 0.0, zi]]))
            n += 1
        else:
            verts.append(np.column_stack((hi * ct, hi * st, np.full(sectors, zi))))
            n += sectors
    faces: list[tuple[int, ...]] = []
    for i in range(h.size - 1):
        s0, s1 = starts[i], starts[i + 1]
        apex0, apex1 = h[i] < PINCH_TOL, h[i + 1] < PINCH_TOL
        if apex0 and apex1:
            continue
        for j in range(sectors):
            k = (j + 1) % sectors
            if apex0:
                faces.append((s0, s1 + j, s1 + k))
            elif apex1:
                faces.append((s0 + j, s1, s0 + k))
            else:
                faces.append((s0 + j, s1 + j, s1 + k, s0 + k))
    return Mesh(np.vstack(verts), faces, int(h.size), sectors, starts,
                None if r is None else np.asarray(r, dtype=float))


def _ring_samples(traj: Trajectory, rings: int):
    r = np.linspace(traj.r[0], traj.r[-1], rings)
    idx = np.clip(np.searchsorted(traj.r, r) - 1, 0, len(traj) - 2)
    r0, r1 = traj.r[idx], traj.r[idx + 1]
    h = _hermite(r0, r1, traj.h[idx], traj.h[idx + 1], traj.u[idx], traj.u[idx + 1], r)
    dz = np.sqrt(np.clip(1.0 - traj.u ** 2, 0.0, None))
    z = _hermite(r0, r1, traj.z[idx], traj.z[idx + 1], dz[idx], dz[idx + 1], r)
    # end rings sit exactly on samples (pinches stay pinches)
    h[0], h[-1], z[0], z[-1] = traj.h[0], traj.h[-1], traj.z[0], traj.z[-1]
    return r, np.maximum(h, 0.0), z


def embed_trajectory(traj: Trajectory, rings: int, sectors: int) -> Mesh:
    """Revolve a trajectory that carries heights ``z`` (see ``integrate(..., with_height=True)``)."""
    if traj.z is None:
        raise InvalidParams("trajectory has no z column; integrate with with_height=True")
    if rings < 2 or sectors < 3:
        raise InvalidParams("need rings >= 2 and sectors >= 3")
    bad = np.flatnonzero(np.abs(traj.u) > 1.0 + _SLACK)
    if bad.size:
        raise EmbeddingLost(float(traj.r[bad[0]]), float(traj.u[bad[0]]))
    r, h, z = _ring_samples(traj, rings)
    return revolve(h, z, sectors, r)


def embed(
    params: SolitonParams,
    init: PhasePoint,
    r_span: float,
    rings: int,
    sectors: int,
    controls: IntegratorControls | None = None,
) -> Mesh:
    """Integrate ``(h, u, z)`` from ``init`` over at most ``r_span`` (or to the next pinch) and revolve.

    Raises
    ------
    EmbeddingLost
        If ``|u|`` exceeds 1 by more than ``1e-9`` anywhere along the way.
    """
    if not r_span > 0:
        raise InvalidParams("r_span must be positive")
    if rings < 2 or sectors < 3:
        raise InvalidParams("need rings >= 2 and sectors >= 3")
    base = controls or IntegratorControls()
    ctl = IntegratorControls(base.rel_tol, base.abs_tol, base.max_step, r_span, base.blowup_guard)
    traj, _ = integrate(params, init, controls=ctl, with_height=True)
    return embed_trajectory(traj, rings, sectors)


def arc_length_errors(mesh: Mesh) -> np.ndarray:
    """Relative error ``|sqrt(dh^2 + dz^2) - dr| / dr`` between consecutive rings."""
    if mesh.ring_r is None:
        raise InvalidParams("mesh carries no meridian parameter")
    h = np.array([np.hypot(*mesh.ring(i)[0, :2]) for i in range(mesh.rings)])
    z = np.array([mesh.ring(i)[0, 2] for i in range(mesh.rings)])
    dr = np.diff(mesh.ring_r)
    return np.abs(np.hypot(np.diff(h), np.diff(z)) - dr) / dr


def ring_perimeters(mesh: Mesh) -> np.ndarray:
    """Polygon perimeter of every ring (0 for apex rings)."""
    out = np.zeros(mesh.rings)
    for i in range(mesh.rings):
        pts = mesh.ring(i)
        if len(pts) > 1:
            out[i] = np.sum(np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1))
    return out


def ring_radii(mesh: Mesh) -> np.ndarray:
    return np.array([np.hypot(*mesh.ring(i)[0, :2]) for i in range(mesh.rings)])

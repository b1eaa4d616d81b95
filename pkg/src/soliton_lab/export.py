"""File formats: OBJ meshes, trajectory CSV, event and metadata JSON sidecars.

All writers are deterministic: fixed significant digits, sorted JSON keys.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .domain import SolitonParams, Trajectory
from .embed import Mesh


def _g(x: float, digits: int) -> str:
    s = f"{x:.{digits}g}"
    return "0" if s == "-0" else s


def obj_text(mesh: Mesh, comment: str | None = None) -> str:
    """ASCII OBJ: a header comment, ``v x y z`` lines, then 1-based ``f`` lines (9 significant digits)."""
    lines = [f"# soliton_lab mesh rings={mesh.rings} sectors={mesh.sectors}"]
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    for x, y, z in mesh.vertices:
        lines.append(f"v {_g(x, 9)} {_g(y, 9)} {_g(z, 9)}")
    for face in mesh.faces:
        lines.append("f " + " ".join(str(i + 1) for i in face))
    return "\n".join(lines) + "\n"


def write_obj(mesh: Mesh, path, comment: str | None = None) -> None:
    Path(path).write_text(obj_text(mesh, comment))


def read_obj(path) -> Mesh:
    """Parse the subset of OBJ that :func:`write_obj` emits (``v`` and ``f`` records)."""
    verts, faces = [], []
    rings = sectors = 0
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "#" and "rings=" in line:
            for tok in parts:
                if tok.startswith("rings="):
                    rings = int(tok[6:])
                elif tok.startswith("sectors="):
                    sectors = int(tok[8:])
        elif parts[0] == "v":
            verts.append([float(t) for t in parts[1:4]])
        elif parts[0] == "f":
            faces.append(tuple(int(t.split("/")[0]) - 1 for t in parts[1:]))
    return Mesh(np.array(verts, dtype=float).reshape(-1, 3), faces, rings, sectors)


def csv_text(traj: Trajectory) -> str:
    """Header ``r,h,u[,z][,f]`` and one row per sample at 17 significant digits."""
    cols = [("r", traj.r), ("h", traj.h), ("u", traj.u)]
    if traj.z is not None:
        cols.append(("z", traj.z))
    if traj.f is not None:
        cols.append(("f", traj.f))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([name for name, _ in cols])
    for row in zip(*(c for _, c in cols)):
        w.writerow([_g(float(x), 17) for x in row])
    return buf.getvalue()


def write_csv(traj: Trajectory, path) -> None:
    Path(path).write_text(csv_text(traj))


def read_csv(path, params: SolitonParams) -> Trajectory:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float).reshape(-1, len(rows[0]))
    col = {name: body[:, i] for i, name in enumerate(header)}
    return Trajectory(params, col["r"], col["h"], col["u"], z=col.get("z"), f=col.get("f"))


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _clean(o):
    # JSON has no NaN/inf
    if isinstance(o, float) and not math.isfinite(o):
        return None
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, default=_json_default)


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj) + "\n")


def write_events_json(traj: Trajectory, path) -> None:
    """Event sidecar: a list of ``{kind, r, h, u}`` records in ``r`` order."""
    write_json([e.to_record() for e in traj.events], path)


def mesh_metadata(params: SolitonParams, mesh: Mesh, record: dict | None = None) -> dict:
    """Sidecar payload ``{params, class, angles, bbox}`` for an exported mesh."""
    v = mesh.vertices
    bbox = [v.min(axis=0).tolist(), v.max(axis=0).tolist()] if len(v) else None
    record = record or {}
    angles = {k: record[k] for k in ("alpha_deg", "beta_deg", "alpha1_deg", "alpha2_deg") if k in record}
    return {
        "params": {"epsilon": params.epsilon, "a": params.a},
        "class": record.get("class"),
        "angles": angles,
        "bbox": bbox,
        "rings": mesh.rings,
        "sectors": mesh.sectors,
        "vertices": int(len(v)),
        "faces": len(mesh.faces),
    }

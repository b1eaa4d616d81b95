"""``soliton-lab`` command line.

Exit codes: 0 success, 2 input that is valid but rejected by the
classification (output is still written), 1 any error, including bad flags.
Angles are read and printed in degrees.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

import click
import numpy as np

from . import export
from .classify import classify, classify_steady_seed
from .domain import TWO_PI, ConeAngle, PhasePoint, SolitonParams, potential_profile
from .embed import embed_trajectory
from .errors import SolitonLabError
from .expanding import ISOCLINE, SEPARATRIX, asymptotics_report, compute_separatrix
from .ode import IntegratorControls, integrate, sample_portrait
from .shrinking import solve_football

EXIT_OK, EXIT_ERROR, EXIT_REJECTED = 0, 1, 2

FLAGS = (SEPARATRIX, ISOCLINE)


class _Rejected(Exception):
    """Signals exit code 2 after all output has been written."""


def _read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment.  ``cmd.key`` scopes a key to one subcommand."""
    flat, scoped = {}, {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise click.BadParameter(f"line {n}: expected key=value, got {raw!r}", param_hint="--config")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if "." in key:
            cmd, key = key.split(".", 1)
            scoped.setdefault(cmd, {})[key] = value
        else:
            flat[key] = value
    return {"flat": flat, "scoped": scoped}


def _slope(value: str):
    if value in FLAGS:
        return value
    try:
        return float(value)
    except ValueError:
        raise click.BadParameter(f"expected a number or one of {FLAGS}, got {value!r}", param_hint="-b") from None


def _controls(rel_tol: float, abs_tol: float, span: float) -> IntegratorControls:
    return IntegratorControls(rel_tol=rel_tol, abs_tol=abs_tol, max_r_span=span)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        Path(out).write_text(text)


def _samples(traj) -> dict:
    out = {"r": traj.r.tolist(), "h": traj.h.tolist(), "u": traj.u.tolist()}
    if traj.z is not None:
        out["z"] = traj.z.tolist()
    if traj.f is not None:
        out["f"] = traj.f.tolist()
    return out


def _summary(traj, report) -> dict:
    end = {"r": float(traj.r[-1]), "h": float(traj.h[-1]), "u": float(traj.u[-1])}
    if traj.termination == "pinch":
        end["cone_angle_deg"] = ConeAngle(TWO_PI * abs(end["u"])).degrees
    return {
        "termination": traj.termination,
        "diagnosis": traj.diagnosis,
        "mirrored": traj.mirrored,
        "samples": len(traj),
        "end": end,
        "first_integral": {
            "initial_value": report.initial_value,
            "relative_drift": report.relative_drift,
            "defined": report.defined,
        },
    }


_common = [
    click.option("--rel-tol", type=float, default=1e-10, show_default=True, help="Integrator relative tolerance."),
    click.option("--abs-tol", type=float, default=1e-12, show_default=True, help="Integrator absolute tolerance."),
]


def _with_tolerances(f):
    for opt in reversed(_common):
        f = opt(f)
    return f


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="key=value file supplying defaults for any flag (cmd.key scopes to one subcommand).")
@click.pass_context
def cli(ctx, config_path):
    """Rotationally symmetric two-dimensional Ricci solitons: integrate, classify, solve and export."""
    if config_path:
        cfg = _read_config(config_path)
        ctx.default_map = {
            name: {**cfg["flat"], **cfg["scoped"].get(name, {})} for name in cli.commands
        }


@cli.command("integrate")
@click.option("-e", "--epsilon", type=click.IntRange(-1, 1), required=True, help="-1 shrinking, 0 steady, +1 expanding.")
@click.option("-a", type=float, required=True, help="Potential slope a > 0.")
@click.option("-b", type=float, required=True, help="Initial slope u(0).")
@click.option("--h0", type=float, default=0.0, show_default=True, help="Initial radius h(0); 0 starts at a pinch.")
@click.option("--span", "r_span", type=float, default=100.0, show_default=True, help="Maximum r span.")
@click.option("--potential/--no-potential", default=False, help="Add the potential column f.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("-o", "--out", type=click.Path(dir_okay=False), help="Output file (events go to <out>.events.json).")
@_with_tolerances
def cmd_integrate(epsilon, a, b, h0, r_span, potential, fmt, out, rel_tol, abs_tol):
    """Integrate one trajectory from (h0, b) to the next pinch, blow-up or the span limit."""
    params = SolitonParams(epsilon, a)
    traj, report = integrate(params, PhasePoint(h0, b), controls=_controls(rel_tol, abs_tol, r_span))
    if potential and len(traj) > 1:
        traj = potential_profile(traj)
    cls = None
    if epsilon == 0 and b == 0:
        click.echo("warning: u = 0 is a line of fixed points; h stays constant", err=True)
    elif h0 == 0:
        cls = classify(epsilon, a, b).to_record(a, b)
    elif epsilon == 0:
        cls = classify_steady_seed(a, PhasePoint(h0, b)).to_record(a, b)
    summary = _summary(traj, report)
    summary["classification"] = cls
    if fmt == "json":
        payload = {"summary": summary, "samples": _samples(traj), "events": [e.to_record() for e in traj.events]}
        _emit(export.dumps(payload) + "\n", out)
    else:
        _emit(export.csv_text(traj), out)
        if out is not None:
            export.write_events_json(traj, f"{out}.events.json")
    if out is not None or fmt == "csv":
        click.echo(export.dumps(summary), err=out is None)
    if cls is not None and "rejected_reason" in cls:
        raise _Rejected(cls["class"])


@cli.command("football")
@click.argument("alpha1_deg", type=float)
@click.argument("alpha2_deg", type=float)
@click.option("-o", "--out", type=click.Path(dir_okay=False), help="Write the JSON result here instead of stdout.")
def cmd_football(alpha1_deg, alpha2_deg, out):
    """Find the unique a > 0 whose shrinking football has cone angles ALPHA1 < ALPHA2 (degrees)."""
    sol = solve_football(math.radians(alpha1_deg), math.radians(alpha2_deg))
    rec = sol.to_record()
    rec["alpha1_deg"], rec["alpha2_deg"] = alpha1_deg, alpha2_deg
    rec["alpha2_reintegrated_deg"] = ConeAngle(TWO_PI * abs(sol.u_exit)).degrees
    _emit(export.dumps(rec) + "\n", out)


@cli.command("classify")
@click.option("-e", "--epsilon", type=click.IntRange(-1, 1), required=True)
@click.option("-a", type=float, required=True)
@click.option("-b", "b_raw", type=str, required=True, help="Pinch slope u(0), or 'separatrix' / 'isocline'.")
def cmd_classify(epsilon, a, b_raw):
    """Classify the soliton whose profile leaves a pinch with slope b."""
    b = _slope(b_raw)
    rec = classify(epsilon, a, b).to_record(a, b)
    click.echo(export.dumps(rec))
    if "rejected_reason" in rec:
        raise _Rejected(rec["class"])


def _window(value: str):
    try:
        parts = tuple(float(x) for x in value.split(","))
    except ValueError:
        parts = ()
    if len(parts) != 4 or not (parts[0] < parts[1] and parts[2] < parts[3]):
        raise click.BadParameter("expected hmin,hmax,umin,umax with min < max", param_hint="--window")
    return parts


@cli.command("portrait")
@click.option("-e", "--epsilon", type=click.IntRange(-1, 1), required=True)
@click.option("-a", type=float, required=True)
@click.option("--window", "window_raw", default="0,3,-1.5,1.5", show_default=True, help="hmin,hmax,umin,umax.")
@click.option("-n", type=click.IntRange(1, 200), default=10, show_default=True, help="Seeds per axis (n x n grid).")
@click.option("--span", "r_span", type=float, default=20.0, show_default=True)
@click.option("-o", "--out", type=click.Path(file_okay=False), required=True, help="Output directory.")
@_with_tolerances
def cmd_portrait(epsilon, a, window_raw, n, r_span, out, rel_tol, abs_tol):
    """Integrate an n x n seed grid both ways; one CSV per seed plus index.json."""
    window = _window(window_raw)
    params = SolitonParams(epsilon, a)
    hs = np.linspace(window[0], window[1], n)
    us = np.linspace(window[2], window[3], n)
    grid = [PhasePoint(float(h), float(u)) for h in hs for u in us]
    entries = sample_portrait(params, grid, _controls(rel_tol, abs_tol, r_span), window=window)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    index = []
    for i, ent in enumerate(entries):
        rec = {"seed": {"h": ent.seed.h, "u": ent.seed.u}, "error": ent.error, "file": None}
        if ent.trajectory is not None:
            name = f"seed_{i:05d}.csv"
            export.write_csv(ent.trajectory, outdir / name)
            rec["file"] = name
            rec["termination"] = ent.trajectory.termination
            rec["relative_drift"] = ent.report.relative_drift if ent.report and ent.report.defined else None
        index.append(rec)
    export.write_json({"epsilon": epsilon, "a": a, "window": list(window), "n": n, "seeds": index},
                      outdir / "index.json")
    failed = sum(1 for r in index if r["error"])
    click.echo(f"{len(index)} seeds written to {outdir} ({failed} failed)")


@cli.command("embed")
@click.option("-e", "--epsilon", type=click.IntRange(-1, 1), required=True)
@click.option("-a", type=float, required=True)
@click.option("-b", type=float, required=True, help="Pinch slope u(0); |b| <= 1 to embed.")
@click.option("-A", "r_span", type=float, default=10.0, show_default=True,
              help="Meridian length (integration stops earlier at a pinch).")
@click.option("--rings", type=click.IntRange(min=2), default=200, show_default=True)
@click.option("--sectors", type=click.IntRange(min=3), default=64, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["obj", "csv"]), default="obj", show_default=True,
              help="obj: mesh; csv: the profile r,h,u,z.")
@click.option("-o", "--out", type=click.Path(dir_okay=False), help="Output file (metadata goes to <out>.json).")
@_with_tolerances
def cmd_embed(epsilon, a, b, r_span, rings, sectors, fmt, out, rel_tol, abs_tol):
    """Rotationally embed the profile leaving the pinch (0, b) and write an OBJ mesh."""
    params = SolitonParams(epsilon, a)
    traj, _ = integrate(params, PhasePoint(0.0, b), controls=_controls(rel_tol, abs_tol, r_span), with_height=True)
    mesh = embed_trajectory(traj, rings, sectors)
    rec = classify(epsilon, a, b).to_record(a, b) if b != 0 or epsilon == 1 else None
    if fmt == "obj":
        comment = f"epsilon={epsilon} a={a!r} b={b!r} A={float(traj.r[-1])!r}"
        _emit(export.obj_text(mesh, comment), out)
    else:
        _emit(export.csv_text(traj), out)
    if out is not None:
        export.write_json(export.mesh_metadata(params, mesh, rec), f"{out}.json")
        click.echo(f"{len(mesh.vertices)} vertices, {len(mesh.faces)} faces -> {out}")
    if rec is not None and "rejected_reason" in rec:
        raise _Rejected(rec["class"])


@cli.command("separatrix")
@click.option("-a", type=float, default=1.0, show_default=True)
@click.option("--extent", type=float, default=200.0, show_default=True, help="Backward reach: r down to -extent.")
@click.option("--delta", type=float, default=1e-8, show_default=True, help="Launch offset from the saddle.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("-o", "--out", type=click.Path(dir_okay=False), help="Output file (report goes to <out>.json).")
def cmd_separatrix(a, extent, delta, fmt, out):
    """Shoot the expanding separatrix (the cusped cone) and report its asymptotics."""
    res = compute_separatrix(a, delta, extent)
    traj = res.trajectory
    report = {
        "class": classify(1, a, SEPARATRIX).to_record(a, SEPARATRIX),
        "delta": res.delta,
        "asym_cone_const": res.asym_cone_const,
        "asym_cusp_const": res.asym_cusp_const,
        "cusp_const_spread": res.cusp_spread,
        "richardson_cone_diff": res.richardson_cone_diff,
        "first_integral_drift": res.first_integral.max_drift,
        "asymptotics": asymptotics_report(traj),
    }
    at = traj.at(-extent) if traj.r[0] <= -extent else None
    if at is not None:
        report["cone_ratio_at_extent"] = a * at.h / (extent / 2.0)
        report["w_at_extent"] = a * at.u
    if fmt == "json":
        _emit(export.dumps({"report": report, "samples": _samples(traj)}) + "\n", out)
    else:
        _emit(export.csv_text(traj), out)
    if out is not None:
        export.write_json(report, f"{out}.json")
    click.echo(export.dumps(report), err=out is None and fmt == "csv")


def main(argv=None) -> int:
    """Entry point with the documented exit codes (click's own usage errors map to 1)."""
    try:
        cli.main(args=argv, prog_name="soliton-lab", standalone_mode=False)
    except _Rejected as exc:
        click.echo(f"rejected: {exc}", err=True)
        return EXIT_REJECTED
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return EXIT_ERROR
    except click.ClickException as exc:
        exc.show()
        return EXIT_ERROR
    except (SolitonLabError, OSError) as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return EXIT_ERROR
    return EXIT_OK


def entry() -> None:
    sys.exit(main())

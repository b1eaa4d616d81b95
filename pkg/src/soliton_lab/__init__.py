"""Numerical laboratory for rotationally symmetric two-dimensional gradient Ricci solitons.

The metric ``dr^2 + h(r)^2 dtheta^2`` with potential ``f' = a h`` reduces the
soliton equation to ``h'' - a h h' - (eps/2) h = 0``.  This package integrates
that ODE, classifies its orbits, solves the football inverse problem and
exports rotational embeddings.
"""

from .classify import classify, classify_steady, classify_steady_seed
from .closed_forms import (
    ClosedForm,
    Family,
    certify,
    closedness_integral,
    const_curvature,
    evaluate,
    spherical_football,
    steady_family,
)
from .domain import (
    ClassKind,
    ConeAngle,
    Event,
    EventKind,
    NormalizedPoint,
    PhasePoint,
    SolitonClass,
    SolitonParams,
    Trajectory,
    cone_angle_from_slope,
    curvature,
    geometry_report,
    potential_profile,
)
from .embed import Mesh, embed, embed_trajectory, revolve
from .errors import *  # noqa: F401,F403
from .expanding import (
    SEPARATRIX,
    SaddleData,
    SeparatrixResult,
    asymptotics_report,
    classify_expanding,
    compute_separatrix,
    saddle_linearization,
)
from .export import read_csv, read_obj, write_csv, write_events_json, write_obj
from .ode import FirstIntegralReport, IntegratorControls, first_integral, integrate, rhs, sample_portrait
from .shrinking import FootballSolution, classify_shrinking, psi, psi_inverse, solve_eqham, solve_football

__version__ = "0.1.0"

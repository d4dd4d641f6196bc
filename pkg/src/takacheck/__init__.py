"""Verification engine for spectral characterizations of minimal immersions.

Charts are written in a small expression language (:mod:`takacheck.expr`),
differentiated exactly with second-order jets (:mod:`takacheck.jet`), and
checked against Laplacian conditions for minimal immersions into spheres,
cylinders ``S^n_c x R^k`` and products ``S^n x S^k``
(:mod:`takacheck.conditions`).
"""

__version__ = "0.1.0"

from .jet import Jet2  # noqa: E402
from .expr import ImmersionSpec, parse  # noqa: E402
from .geometry import FrameSplit, GeometryAtPoint, NotAnImmersion, geometry_at  # noqa: E402
from .conditions import ConditionResult, check_cylinder, check_sphere, check_torus  # noqa: E402
from .catalog import instantiate, solve_b  # noqa: E402
from .report import CheckReport, SamplePlan, generate_samples, run_check  # noqa: E402

__all__ = [
    "__version__",
    "Jet2",
    "ImmersionSpec",
    "parse",
    "FrameSplit",
    "GeometryAtPoint",
    "NotAnImmersion",
    "geometry_at",
    "ConditionResult",
    "check_sphere",
    "check_cylinder",
    "check_torus",
    "instantiate",
    "solve_b",
    "CheckReport",
    "SamplePlan",
    "generate_samples",
    "run_check",
]

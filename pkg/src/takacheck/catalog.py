"""Analytic immersions with known answers.

Each entry builds an :class:`ImmersionSpec` from immersion-file source text,
a default frame split, and the verdicts the checkers are expected to return.
The entries double as oracles for the test suite.

``example34`` is the family of flat ``n``-tori winding around
``S^{2n-1} x R``::

    F(x) = (1/sqrt(n)) (cos a x1, sin a x1, ..., cos a xn, sin a xn, b (x1 + ... + xn))

which is minimal in the cylinder for ``sqrt(n-1) < a <= sqrt(n)`` once ``b``
comes from :func:`solve_b`. Its coordinates are not Euclidean-isometric: the
induced metric is ``g_ij = (a^2 delta_ij + b^2) / n``, and all checks use it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .conditions import DEGENERATE, PRODUCT_MINIMAL, SATISFIED, SPHERE_MINIMAL, VIOLATED
from .expr import ImmersionSpec, parse
from .geometry import FrameSplit

__all__ = [
    "OutOfRange",
    "CatalogEntry",
    "CATALOG",
    "solve_b",
    "instantiate",
    "list_entries",
    "format_listing",
    "format_entry",
]


class OutOfRange(ValueError):
    """A catalog parameter lies outside the family's valid range."""


# a^2 this close to n counts as a^2 == n, so a = sqrt(n) typed as a float works;
# the same band around n - 1 keeps a rounded sqrt(n-1) out of range.
_ENDPOINT_RTOL = 1e-12


def solve_b(n: int, a: float) -> float:
    """Height slope ``b >= 0`` making ``example34(n, a)`` minimal in ``S^{2n-1} x R``.

    ``b^2 = a^2 (n - a^2) / (n (a^2 - n + 1))`` for ``sqrt(n-1) < a <= sqrt(n)``.

    >>> round(solve_b(2, math.sqrt(1.5)) ** 2, 12)
    0.75
    """
    if int(n) != n or n < 2:
        raise OutOfRange(f"n must be an integer >= 2, got {n!r}")
    n = int(n)
    a2 = float(a) * float(a)
    if not a > 0 or a2 - n + 1 <= _ENDPOINT_RTOL * n:
        raise OutOfRange(f"need sqrt(n-1) < a: a={a!r}, n={n}")
    if abs(a2 - n) <= _ENDPOINT_RTOL * n:
        return 0.0
    if a2 > n:
        raise OutOfRange(f"need a <= sqrt(n): a={a!r}, n={n}")
    return math.sqrt(a2 * (n - a2) / (n * (a2 - n + 1)))


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    description: str
    defaults: Mapping[str, float]
    build: Callable[[dict], tuple]
    provenance: str
    param_help: Mapping[str, str] = field(default_factory=dict)


def _expect(verdict: str, branch: str | None = None, **constants) -> dict:
    out = {"verdict": verdict, "constants": constants}
    if branch:
        out["branch"] = branch
    return out


def _plane(p):
    spec = parse("dim 2 -> 3; F = (x1, x2, 0); box x1 in [0,1], x2 in [0,1]", name="plane")
    expected = {
        "sphere": _expect(VIOLATED, c=0.0),
        "cylinder": _expect(DEGENERATE),
    }
    return spec, FrameSplit.cylinder(1, 1), expected


def _round_sphere(p):
    spec = parse(
        """
        dim 2 -> 3;
        F = (sin(x1)*cos(x2), sin(x1)*sin(x2), cos(x1));
        box x1 in [0.2, pi - 0.2], x2 in [0, 2*pi];
        """,
        name="round_sphere",
    )
    return spec, FrameSplit.cylinder(1, 1), {"sphere": _expect(SATISFIED, c=1.0), "cylinder": _expect(DEGENERATE)}


def _circle(p):
    rho = p["rho"]
    if not rho > 0:
        raise OutOfRange("circle needs rho > 0")
    spec = parse(
        f"param rho={rho!r}; dim 1 -> 2; F = (rho*cos(x1), rho*sin(x1)); box x1 in [0, 2*pi]",
        name="circle",
    )
    return spec, None, {"sphere": _expect(SATISFIED, c=1.0 / rho**2)}


def _latitude_circle(p):
    z0 = p["z0"]
    if not abs(z0) < 1:
        raise OutOfRange("latitude_circle needs |z0| < 1")
    spec = parse(
        f"""
        param z0={z0!r};
        dim 1 -> 3;
        F = (sqrt(1 - z0^2)*cos(x1), sqrt(1 - z0^2)*sin(x1), z0);
        box x1 in [0, 2*pi];
        """,
        name="latitude_circle",
    )
    rho2 = 1.0 - z0 * z0
    sphere = _expect(SATISFIED, c=1.0) if z0 == 0 else _expect(VIOLATED, c=1.0)
    return spec, FrameSplit.cylinder(1, 1), {"sphere": sphere, "cylinder": _expect(SATISFIED, c=1.0 / rho2, r2=rho2)}


def _clifford_torus(p):
    spec = parse(
        """
        param s=1/sqrt(2);
        dim 2 -> 4;
        F = (s*cos(x1), s*sin(x1), s*cos(x2), s*sin(x2));
        box x1 in [0, 2*pi], x2 in [0, 2*pi];
        """,
        name="clifford_torus",
    )
    return spec, FrameSplit.torus(1, 1), {"sphere": _expect(SATISFIED, c=1.0), "torus": _expect(DEGENERATE)}


def _example34(p):
    n = p["n"]
    if int(n) != n:
        raise OutOfRange(f"n must be an integer, got {n!r}")
    n = int(n)
    a = p["a"]
    b = solve_b(n, a)
    circles = ", ".join(f"s*cos(a*x{j}), s*sin(a*x{j})" for j in range(1, n + 1))
    total = " + ".join(f"x{j}" for j in range(1, n + 1))
    ranges = ", ".join(f"x{j} in [0, 2*pi]" for j in range(1, n + 1))
    spec = parse(
        f"""
        param a={a!r};
        param b={b!r};
        param s=1/sqrt({n});
        dim {n} -> {2 * n + 1};
        F = ({circles}, s*b*({total}));
        box {ranges};
        """,
        name="example34",
    )
    a2 = a * a
    tangent_sq = n * b * b / (a2 + n * b * b)
    expected = {
        "cylinder": _expect(SATISFIED, c=1.0, r2=1.0, flat_tangent_sq=tangent_sq),
        # b = 0 leaves a Clifford-type torus in the unit sphere
        "sphere": _expect(SATISFIED, c=1.0) if b == 0.0 else _expect(VIOLATED),
    }
    return spec, FrameSplit.cylinder(2 * n - 1, 1), expected


def _right_cylinder(p):
    spec = parse("dim 2 -> 3; F = (cos(x1), sin(x1), x2); box x1 in [0, 2*pi], x2 in [-1, 1]", name="right_cylinder")
    return spec, FrameSplit.cylinder(1, 1), {"cylinder": _expect(SATISFIED, c=1.0, r2=1.0), "sphere": _expect(VIOLATED)}


def _helix_graph(p):
    spec = parse(
        f"param slope={p['slope']!r}; dim 2 -> 3; F = (cos(x1), sin(x1), x2 + slope*x1); "
        "box x1 in [0, 2*pi], x2 in [-1, 1]",
        name="helix_graph",
    )
    # a reparametrized right cylinder: frozen from an independent two-sided evaluation
    return spec, FrameSplit.cylinder(1, 1), {"cylinder": _expect(SATISFIED, c=1.0, r2=1.0)}


def _slanted_circle(p):
    spec = parse(
        f"param tilt={p['tilt']!r}; dim 1 -> 3; F = (cos(x1), sin(x1), tilt*sin(x1)); box x1 in [0, 2*pi]",
        name="slanted_circle",
    )
    verdict = SATISFIED if p["tilt"] == 0 else VIOLATED
    return spec, FrameSplit.cylinder(1, 1), {"cylinder": _expect(verdict, c=1.0, r2=1.0), "sphere": _expect(verdict)}


def _product_circles(p):
    spec = parse(
        "dim 2 -> 4; F = (cos(x1), sin(x1), cos(x2), sin(x2)); box x1 in [0, 2*pi], x2 in [0, 2*pi]",
        name="product_circles",
    )
    return spec, FrameSplit.torus(1, 1), {
        "torus": _expect(SATISFIED, SPHERE_MINIMAL, c=0.5),
        "sphere": _expect(SATISFIED, c=0.5),
    }


def _diagonal_circle(p):
    spec = parse(
        "dim 1 -> 4; F = (cos(x1), sin(x1), cos(x1), sin(x1)); box x1 in [0, 2*pi]",
        name="diagonal_circle",
    )
    return spec, FrameSplit.torus(1, 1), {
        "torus": _expect(SATISFIED, SPHERE_MINIMAL, c=0.5),
        "sphere": _expect(SATISFIED, c=0.5),
    }


def _scaled_product(p):
    r2 = p["r2"]
    if not 0 < r2 < 2:
        raise OutOfRange("scaled_product needs 0 < r2 < 2")
    spec = parse(
        f"""
        param r2={r2!r};
        dim 2 -> 4;
        F = (sqrt(r2)*cos(x1), sqrt(r2)*sin(x1), sqrt(2 - r2)*cos(x2), sqrt(2 - r2)*sin(x2));
        box x1 in [0, 2*pi], x2 in [0, 2*pi];
        """,
        name="scaled_product",
    )
    verdict = SATISFIED if r2 == 1 else VIOLATED
    return spec, FrameSplit.torus(1, 1), {"torus": _expect(verdict, SPHERE_MINIMAL), "sphere": _expect(verdict)}


def _torus_line(p):
    alpha, beta = p["alpha"], p["beta"]
    if alpha == 0 or beta == 0:
        raise OutOfRange("torus_line needs nonzero alpha and beta")
    spec = parse(
        f"""
        param alpha={alpha!r};
        param beta={beta!r};
        dim 1 -> 4;
        F = (cos(alpha*x1), sin(alpha*x1), cos(beta*x1), sin(beta*x1));
        box x1 in [0, 2*pi];
        """,
        name="torus_line",
    )
    if alpha * alpha == beta * beta:
        expected = {"torus": _expect(SATISFIED, SPHERE_MINIMAL, c=0.5), "sphere": _expect(SATISFIED, c=0.5)}
    else:
        expected = {"torus": _expect(SATISFIED, PRODUCT_MINIMAL, r2=1.0, s2=1.0), "sphere": _expect(VIOLATED)}
    return spec, FrameSplit.torus(1, 1), expected


CATALOG: dict[str, CatalogEntry] = {
    e.id: e
    for e in [
        CatalogEntry("plane", "coordinate plane in R^3", {}, _plane, "totally geodesic; Delta F = 0"),
        CatalogEntry("round_sphere", "unit sphere, polar chart", {}, _round_sphere, "Delta F = -2F on the unit sphere"),
        CatalogEntry("circle", "circle of radius rho", {"rho": 1.0}, _circle, "Delta F = -F / rho^2",
                     {"rho": "radius > 0"}),
        CatalogEntry("latitude_circle", "circle at height z0 on the unit sphere", {"z0": 0.5}, _latitude_circle,
                     "geodesic of S^1 x R, not minimal in S^2 unless z0 = 0", {"z0": "|z0| < 1"}),
        CatalogEntry("clifford_torus", "Clifford torus in S^3", {}, _clifford_torus,
                     "minimal in the unit S^3; Delta F = -2F"),
        CatalogEntry("example34", "flat n-torus in S^{2n-1} x R", {"n": 2, "a": math.sqrt(1.5)}, _example34,
                     "minimal in S^{2n-1} x R with b from solve_b",
                     {"n": "integer >= 2", "a": "sqrt(n-1) < a <= sqrt(n)"}),
        CatalogEntry("right_cylinder", "unit right cylinder", {}, _right_cylinder, "S^1 x R itself"),
        CatalogEntry("helix_graph", "right cylinder in sheared coordinates", {"slope": 0.3}, _helix_graph,
                     "reparametrized S^1 x R", {"slope": "any real"}),
        CatalogEntry("slanted_circle", "ellipse cut from the unit cylinder", {"tilt": 0.5}, _slanted_circle,
                     "in S^1 x R but not a geodesic for tilt != 0", {"tilt": "any real"}),
        CatalogEntry("product_circles", "S^1 x S^1 in R^4", {}, _product_circles,
                     "minimal in S^3(sqrt 2); block sums agree"),
        CatalogEntry("diagonal_circle", "great circle of S^3(sqrt 2)", {}, _diagonal_circle,
                     "Delta F = -F/2 with m = 1"),
        CatalogEntry("scaled_product", "S^1(r) x S^1(s) with r^2 + s^2 = 2", {"r2": 1.5}, _scaled_product,
                     "on S^3(sqrt 2) but minimal only for r2 = 1", {"r2": "0 < r2 < 2"}),
        CatalogEntry("torus_line", "line of slope beta/alpha on S^1 x S^1", {"alpha": 1.0, "beta": 2.0}, _torus_line,
                     "geodesic of S^1 x S^1 with unequal block sums", {"alpha": "nonzero", "beta": "nonzero"}),
    ]
}


def list_entries() -> list[str]:
    return sorted(CATALOG)


def instantiate(id: str, params: Mapping[str, float] | None = None) -> tuple[ImmersionSpec, FrameSplit | None, dict]:
    """Build catalog entry ``id``; returns ``(spec, default_frame, expected)``.

    ``expected`` maps a check kind (``sphere``, ``cylinder``, ``torus``) to
    ``{"verdict": ..., "constants": {...}, "branch"?: ...}``.
    """
    try:
        entry = CATALOG[id]
    except KeyError:
        raise KeyError(f"unknown catalog entry {id!r}; known: {', '.join(list_entries())}") from None
    merged = dict(entry.defaults)
    for k, v in (params or {}).items():
        if k not in merged:
            raise OutOfRange(f"{id} has no parameter {k!r} (parameters: {', '.join(merged) or 'none'})")
        merged[k] = float(v)
    return entry.build(merged)


def _verdicts(expected: dict) -> str:
    parts = []
    for kind in sorted(expected):
        e = expected[kind]
        parts.append(f"{kind}={e['verdict']}" + (f"/{e['branch']}" if "branch" in e else ""))
    return " ".join(parts)


def format_listing() -> str:
    """One line per entry: id, dimensions, default parameters, expected verdicts."""
    lines = []
    for id in list_entries():
        entry = CATALOG[id]
        spec, _, expected = entry.build(dict(entry.defaults))
        params = ",".join(f"{k}={v:g}" for k, v in entry.defaults.items()) or "-"
        lines.append(f"{id:<16} m={spec.m} N={spec.N}  params={params}  {_verdicts(expected)}")
    return "\n".join(lines) + "\n"


def format_entry(id: str, params: Mapping[str, float] | None = None) -> str:
    from .expr import to_source

    entry = CATALOG[id]
    spec, frame, expected = instantiate(id, params)
    lines = [
        f"id: {id}",
        f"description: {entry.description}",
        f"provenance: {entry.provenance}",
        f"dimensions: m={spec.m} N={spec.N}",
    ]
    for k, v in entry.defaults.items():
        lines.append(f"param {k} (default {v:g}): {entry.param_help.get(k, '')}".rstrip())
    if frame is not None:
        lines.append(f"default frame: {frame.kind} n={frame.n} k={frame.k}")
    for kind in sorted(expected):
        e = expected[kind]
        consts = ", ".join(f"{k}={v:.12g}" for k, v in e["constants"].items())
        branch = f" [{e['branch']}]" if "branch" in e else ""
        lines.append(f"expected {kind}: {e['verdict']}{branch}" + (f" ({consts})" if consts else ""))
    lines.append("source:")
    lines.extend("  " + ln for ln in to_source(spec).splitlines())
    return "\n".join(lines) + "\n"

"""Pointwise Riemannian geometry of a parametrized immersion.

Everything is computed from the exact first and second partials of the chart:
the induced metric ``g = dF^T dF``, Christoffel symbols from the ambient
formula ``Gamma^k_ij = g^kl <d_i d_j F, d_l F>``, the Laplace-Beltrami operator
(trace of the Hessian, so ``Delta F = -m F`` on a unit sphere), the second
fundamental form and the tangential part of constant ambient vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import jet as J
from .expr import Expr, ImmersionSpec, eval_chart, eval_scalar, parse_scalar

__all__ = [
    "EPS_IMMERSION",
    "TOL_ORTH",
    "NotAnImmersion",
    "FrameSplit",
    "GeometryAtPoint",
    "geometry_at",
    "laplacian_of_jet",
    "laplace_beltrami_scalar",
    "second_fundamental_form",
    "tangent_projection_norms",
    "norm_squared_jet",
    "height_expr",
    "norm_squared_expr",
]

EPS_IMMERSION = 1e-10
TOL_ORTH = 1e-9
FRAME_TOL = 1e-12


class NotAnImmersion(ValueError):
    """The chart differential is (numerically) rank deficient at ``point``."""

    def __init__(self, point: Sequence[float], det_g: float):
        self.point = tuple(float(p) for p in point)
        self.det_g = float(det_g)
        super().__init__(
            f"not an immersion at {self.point}: det g = {self.det_g:.3e} <= {EPS_IMMERSION:g}"
        )


@dataclass(frozen=True, eq=False)
class GeometryAtPoint:
    point: np.ndarray
    F: np.ndarray  # (N,)
    dF: np.ndarray  # (N, m)
    d2F: np.ndarray  # (N, m, m)
    g: np.ndarray
    g_inv: np.ndarray
    sqrt_det_g: float
    gamma: np.ndarray  # gamma[k, i, j] = Gamma^k_ij
    laplace_F: np.ndarray
    mean_curvature: np.ndarray

    @property
    def m(self) -> int:
        return self.dF.shape[1]

    @property
    def N(self) -> int:
        return self.dF.shape[0]


def _from_jets(point: np.ndarray, jets: list[J.Jet2]) -> GeometryAtPoint:
    F = np.array([j.value for j in jets])
    dF = np.stack([j.grad for j in jets])
    d2F = np.stack([j.hess for j in jets])
    m = dF.shape[1]
    g = dF.T @ dF
    det = float(np.linalg.det(g))
    if not det > EPS_IMMERSION:
        raise NotAnImmersion(point, det)
    # LU with partial pivoting; g is SPD and well away from singular here.
    g_inv = np.linalg.solve(g, np.eye(m))
    g_inv = 0.5 * (g_inv + g_inv.T)
    # <d_i d_j F, d_l F>, then raise l
    lowered = np.einsum("aij,al->lij", d2F, dF)
    gamma = np.einsum("kl,lij->kij", g_inv, lowered)
    laplace_F = _trace(g_inv, d2F - np.einsum("kij,ak->aij", gamma, dF))
    return GeometryAtPoint(
        point=point,
        F=F,
        dF=dF,
        d2F=d2F,
        g=g,
        g_inv=g_inv,
        sqrt_det_g=float(np.sqrt(det)),
        gamma=gamma,
        laplace_F=laplace_F,
        mean_curvature=laplace_F / m,
    )


def _trace(g_inv: np.ndarray, tensor: np.ndarray) -> np.ndarray:
    return np.einsum("ij,...ij->...", g_inv, tensor)


def geometry_at(spec: ImmersionSpec, point: Sequence[float]) -> GeometryAtPoint:
    """Metric, connection, Laplacian and mean curvature of ``spec`` at ``point``.

    Raises:
        NotAnImmersion: if ``det g <= 1e-10`` at the point.
    """
    p = np.asarray(point, dtype=float).reshape(-1)
    return _from_jets(p, eval_chart(spec, p))


def laplacian_of_jet(geo: GeometryAtPoint, h: J.Jet2) -> float:
    """``sum_ij g^ij (d_i d_j h - Gamma^k_ij d_k h)`` for a scalar jet ``h``."""
    return float(_trace(geo.g_inv, h.hess - np.einsum("kij,k->ij", geo.gamma, h.grad)))


def laplace_beltrami_scalar(
    spec: ImmersionSpec,
    scalar: Expr | str,
    point: Sequence[float],
    geo: GeometryAtPoint | None = None,
) -> float:
    """Laplace-Beltrami of a scalar given as an expression in ``x_i`` and ``F_a``.

    ``scalar`` may be source text (parsed against ``spec``) or an already
    parsed node; e.g. ``"F1^2 + F2^2 + F3^2"`` or ``"F3"``.
    """
    if isinstance(scalar, str):
        scalar = parse_scalar(scalar, spec)
    p = np.asarray(point, dtype=float).reshape(-1)
    jets = eval_chart(spec, p)
    if geo is None:
        geo = _from_jets(p, jets)
    return laplacian_of_jet(geo, eval_scalar(scalar, spec, p, jets))


def norm_squared_jet(jets: list[J.Jet2]) -> J.Jet2:
    acc = jets[0] * jets[0]
    for j in jets[1:]:
        acc = acc + j * j
    return acc


def norm_squared_expr(spec: ImmersionSpec) -> str:
    return " + ".join(f"F{a + 1}^2" for a in range(spec.N))


def height_expr(spec: ImmersionSpec, v: Sequence[float]) -> str:
    """Source text of the height function ``<F, v>``."""
    terms = [f"({float(c)!r})*F{a + 1}" for a, c in enumerate(v)]
    return " + ".join(terms)


def second_fundamental_form(geo: GeometryAtPoint) -> np.ndarray:
    """``alpha[:, i, j] = d_i d_j F - Gamma^k_ij d_k F`` (normal-valued)."""
    return geo.d2F - np.einsum("kij,ak->aij", geo.gamma, geo.dF)


@dataclass(frozen=True, eq=False)
class FrameSplit:
    """Orthonormal ambient frame (columns of ``E``) plus a factor split.

    ``kind == "cylinder"``: ``N = n + k + 1`` and the last ``k`` columns span
    the flat factor. ``kind == "torus"``: ``N = n + k + 2``, the first ``n + 1``
    columns span the first sphere factor and the rest the second.
    """

    E: np.ndarray
    kind: str
    n: int
    k: int

    def __post_init__(self):
        E = np.array(self.E, dtype=float)
        object.__setattr__(self, "E", E)
        if self.kind not in ("cylinder", "torus"):
            raise ValueError(f"unknown split kind {self.kind!r}")
        if self.n < 0 or self.k < 0:
            raise ValueError("split dimensions must be non-negative")
        N = self.n + self.k + (1 if self.kind == "cylinder" else 2)
        if E.shape != (N, N):
            raise ValueError(f"{self.kind} split n={self.n}, k={self.k} needs a {N}x{N} frame, got {E.shape}")
        err = float(np.max(np.abs(E.T @ E - np.eye(N))))
        if err > FRAME_TOL:
            raise ValueError(f"frame is not orthonormal (max |E^T E - I| = {err:.3e})")

    @classmethod
    def cylinder(cls, n: int, k: int, E=None) -> "FrameSplit":
        N = n + k + 1
        return cls(np.eye(N) if E is None else E, "cylinder", n, k)

    @classmethod
    def torus(cls, n: int, k: int, E=None) -> "FrameSplit":
        N = n + k + 2
        return cls(np.eye(N) if E is None else E, "torus", n, k)

    @property
    def N(self) -> int:
        return self.E.shape[0]

    @property
    def first_block(self) -> np.ndarray:
        """Sphere-factor columns (the first ``n + 1``)."""
        return np.arange(self.n + 1)

    @property
    def second_block(self) -> np.ndarray:
        """Flat-factor (cylinder) or second-sphere (torus) columns."""
        return np.arange(self.n + 1, self.N)

    def rotated(self, Q) -> "FrameSplit":
        return FrameSplit(np.asarray(Q, dtype=float) @ self.E, self.kind, self.n, self.k)

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "k": self.k,
            "N": self.N,
            "standard_basis": bool(np.array_equal(self.E, np.eye(self.N))),
        }


def tangent_projection_norms(geo: GeometryAtPoint, frame: FrameSplit | np.ndarray) -> np.ndarray:
    """``|T_i|^2`` for every frame vector ``E_i``; ``T_i`` is its tangential part."""
    E = frame.E if isinstance(frame, FrameSplit) else np.asarray(frame, dtype=float)
    if E.shape[0] != geo.N:
        raise ValueError(f"frame has dimension {E.shape[0]}, immersion has N={geo.N}")
    A = E.T @ geo.dF  # A[i, a] = <E_i, d_a F>
    return np.einsum("ia,ab,ib->i", A, geo.g_inv, A)

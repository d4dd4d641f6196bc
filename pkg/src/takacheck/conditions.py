"""Spectral conditions for minimal immersions into spheres, cylinders and tori.

Each checker evaluates the geometry of a chart on a list of sample points and
tests one Laplacian identity:

* sphere:   ``Delta F = -m c F`` with ``c > 0``;
* cylinder: ``Delta F = -c (m - s) P`` where ``P`` drops the flat-factor part
  of ``F``, ``s`` is the tangential energy of the flat directions and
  ``c = 1 / |P|^2`` (``|P|`` must be constant);
* torus:    ``Delta F = -(m - S2) N1 - (m - S1) N2`` on the sphere
  ``|F|^2 = 2``, with the branch ``S1 == S2`` reducing to ``Delta F = -(m/2) F``.

Residuals are reported relative to ``m`` so that one tolerance serves all
dimensions.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .expr import ImmersionSpec, eval_chart
from .geometry import (
    TOL_ORTH,
    FrameSplit,
    GeometryAtPoint,
    _from_jets,
    laplacian_of_jet,
    norm_squared_jet,
    tangent_projection_norms,
)

__all__ = [
    "SATISFIED",
    "VIOLATED",
    "DEGENERATE",
    "SPHERE_MINIMAL",
    "PRODUCT_MINIMAL",
    "TOL_CHECK",
    "TOL_CONST",
    "ConditionResult",
    "SampleEvaluation",
    "evaluate_samples",
    "recover_constants",
    "check_sphere",
    "check_cylinder",
    "check_torus",
]


SATISFIED = "Satisfied"
VIOLATED = "Violated"
DEGENERATE = "Degenerate"
SPHERE_MINIMAL = "SphereMinimal"
PRODUCT_MINIMAL = "ProductMinimal"

TOL_CHECK = 1e-8
TOL_CONST = 1e-8
MIN_NORM = 1e-12

# identity name -> acceptance tolerance used in the residual table
IDENTITY_TOLERANCES = {
    "frame_completeness": 1e-10,
    "laplacian_mean_curvature": 1e-14,
    "mean_curvature_normality": TOL_ORTH,
    "norm_squared_laplacian": 1e-8,
    "flat_tangent_energy": 1e-8,
    "flat_factor_orthogonality": 1e-12,
    "product_condition": TOL_CHECK,
}


@dataclass
class ConditionResult:
    kind: str  # Sphere | Cylinder | Torus
    residual_max: float
    residual_rms: float
    recovered: dict
    spread: dict
    verdict: str
    samples_used: int
    branch: str | None = None
    observed: dict = field(default_factory=dict)
    identities: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    tol_check: float = TOL_CHECK
    tol_const: float = TOL_CONST

    @property
    def satisfied(self) -> bool:
        return self.verdict == SATISFIED

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "verdict": self.verdict,
            "branch": self.branch,
            "residual_max": self.residual_max,
            "residual_rms": self.residual_rms,
            "recovered": dict(self.recovered),
            "spread": dict(self.spread),
            "observed": dict(self.observed),
            "identities": {k: dict(v) for k, v in sorted(self.identities.items())},
            "samples_used": self.samples_used,
            "notes": list(self.notes),
            "tol_check": self.tol_check,
            "tol_const": self.tol_const,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConditionResult":
        return cls(
            kind=d["kind"],
            residual_max=d["residual_max"],
            residual_rms=d["residual_rms"],
            recovered=dict(d["recovered"]),
            spread=dict(d["spread"]),
            verdict=d["verdict"],
            samples_used=d["samples_used"],
            branch=d.get("branch"),
            observed=dict(d.get("observed", {})),
            identities={k: dict(v) for k, v in d.get("identities", {}).items()},
            notes=list(d.get("notes", [])),
            tol_check=d.get("tol_check", TOL_CHECK),
            tol_const=d.get("tol_const", TOL_CONST),
        )


@dataclass(frozen=True, eq=False)
class SampleEvaluation:
    """Geometry at one sample plus the Laplacian of ``|F|^2``."""

    geo: GeometryAtPoint
    laplace_norm_sq: float


def _evaluate_one(spec: ImmersionSpec, point) -> SampleEvaluation:
    p = np.asarray(point, dtype=float).reshape(-1)
    jets = eval_chart(spec, p)
    geo = _from_jets(p, jets)
    return SampleEvaluation(geo, laplacian_of_jet(geo, norm_squared_jet(jets)))


def evaluate_samples(spec: ImmersionSpec, samples: Sequence, workers: int = 1) -> list[SampleEvaluation]:
    """Evaluate every sample; output order always matches ``samples``."""
    if workers <= 1:
        return [_evaluate_one(spec, p) for p in samples]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda p: _evaluate_one(spec, p), samples))


def recover_constants(values: Sequence[float], tol_const: float = TOL_CONST) -> tuple[float, float, bool]:
    """Mean, sample standard deviation and whether the values are constant."""
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size == 0:
        raise ValueError("recover_constants needs at least one value")
    mean = float(np.mean(arr))
    spread = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
    return mean, spread, spread <= tol_const


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(x))))


def _identity(values, tol: float | None = None, name: str | None = None) -> dict:
    values = np.asarray(values, dtype=float)
    tol = IDENTITY_TOLERANCES[name] if tol is None else tol
    worst = float(np.max(values))
    return {"max": worst, "rms": _rms(values), "tol": tol, "ok": bool(worst <= tol)}


def _common_identities(evals: list[SampleEvaluation]) -> dict:
    lap_h, normal, norm_sq, complete = [], [], [], []
    for ev in evals:
        geo = ev.geo
        L, H, m = geo.laplace_F, geo.mean_curvature, geo.m
        lap_h.append(np.linalg.norm(L - m * H) / max(1.0, np.linalg.norm(L)))
        hn = np.linalg.norm(H)
        if hn > 0:
            cols = np.linalg.norm(geo.dF, axis=0)
            normal.append(float(np.max(np.abs(H @ geo.dF) / (hn * cols))))
        else:
            normal.append(0.0)
        rhs = 2.0 * (float(L @ geo.F) + m)
        norm_sq.append(abs(ev.laplace_norm_sq - rhs) / max(1.0, abs(rhs)))
        complete.append(abs(float(np.sum(tangent_projection_norms(geo, np.eye(geo.N)))) - m))
    return {
        "frame_completeness": _identity(complete, name="frame_completeness"),
        "laplacian_mean_curvature": _identity(lap_h, name="laplacian_mean_curvature"),
        "mean_curvature_normality": _identity(normal, name="mean_curvature_normality"),
        "norm_squared_laplacian": _identity(norm_sq, name="norm_squared_laplacian"),
    }


def _require_samples(samples) -> None:
    if len(samples) < 2:
        raise ValueError(f"need at least 2 samples, got {len(samples)}")


def check_sphere(
    spec: ImmersionSpec,
    samples: Sequence,
    tol: float = TOL_CHECK,
    tol_const: float = TOL_CONST,
    workers: int = 1,
) -> ConditionResult:
    """Test ``Delta F = -m c F`` for one constant ``c > 0``.

    ``c`` is the least-squares fit over all samples; the residual at a sample
    is ``|Delta F + m c F| / (m max(1, |F|))``.
    """
    _require_samples(samples)
    evals = evaluate_samples(spec, samples, workers)
    m = spec.m
    F = np.array([ev.geo.F for ev in evals])
    L = np.array([ev.geo.laplace_F for ev in evals])
    norms = np.linalg.norm(F, axis=1)
    notes = []
    identities = _common_identities(evals)
    if np.any(norms < MIN_NORM):
        notes.append("DegenerateFit: |F| vanishes at a sample; c is undetermined")
        return ConditionResult(
            "Sphere", float("inf"), float("inf"), {"c": 0.0}, {"c": 0.0},
            DEGENERATE, len(samples), identities=identities, notes=notes,
            tol_check=tol, tol_const=tol_const,
        )
    dots = np.einsum("pa,pa->p", L, F)
    c = float(-np.sum(dots) / (m * np.sum(norms**2))) + 0.0
    c_samples = -dots / (m * norms**2)
    _, c_spread, _ = recover_constants(c_samples, tol_const)
    res = np.linalg.norm(L + m * c * F, axis=1) / (m * np.maximum(1.0, norms))
    residual_max = float(np.max(res))

    verdict = SATISFIED
    if residual_max > tol or c_spread > tol_const:
        verdict = VIOLATED
    if abs(c) <= tol_const:
        notes.append("fitted c = 0: excluded, the condition needs c != 0")
        verdict = VIOLATED
    elif c < 0:
        notes.append("fitted c < 0: no isometric immersion has this spectrum")
        verdict = VIOLATED
    return ConditionResult(
        "Sphere", residual_max, _rms(res), {"c": c}, {"c": c_spread}, verdict, len(samples),
        observed={"norm_F_mean": float(np.mean(norms))},
        identities=identities, notes=notes, tol_check=tol, tol_const=tol_const,
    )


def _check_frame(spec: ImmersionSpec, frame: FrameSplit, kind: str) -> None:
    if frame.kind != kind:
        raise ValueError(f"expected a {kind} frame split, got {frame.kind}")
    if frame.N != spec.N:
        raise ValueError(f"frame dimension {frame.N} does not match immersion N={spec.N}")


def check_cylinder(
    spec: ImmersionSpec,
    frame: FrameSplit,
    samples: Sequence,
    tol: float = TOL_CHECK,
    tol_const: float = TOL_CONST,
    workers: int = 1,
) -> ConditionResult:
    """Test the cylinder condition ``Delta F = -c (m - s) P`` with ``c = 1/|P|^2``.

    Also checks ``Delta |F|^2 = 2 s`` at every sample; both residuals enter
    ``residual_max``. A non-constant ``|P|^2`` means the image is not inside
    any cylinder of this split, reported as Degenerate.
    """
    _check_frame(spec, frame, "cylinder")
    _require_samples(samples)
    evals = evaluate_samples(spec, samples, workers)
    m = spec.m
    Ef = frame.E[:, frame.second_block]
    main, energy, orth = [], [], []
    p_sq, s_vals, norms = [], [], []
    P_all, L_all = [], []
    for ev in evals:
        geo = ev.geo
        P = geo.F - Ef @ (Ef.T @ geo.F)
        s = float(np.sum(tangent_projection_norms(geo, frame)[frame.second_block]))
        P_all.append(P)
        L_all.append(geo.laplace_F)
        p_sq.append(float(P @ P))
        s_vals.append(s)
        norms.append(float(np.linalg.norm(geo.F)))
        energy.append(abs(ev.laplace_norm_sq - 2.0 * s) / (2.0 * m))
        orth.append(float(np.max(np.abs(Ef.T @ P))) if Ef.shape[1] else 0.0)

    r2, r2_spread, r2_const = recover_constants(p_sq, tol_const)
    notes = []
    identities = _common_identities(evals)
    identities["flat_factor_orthogonality"] = _identity(orth, name="flat_factor_orthogonality")
    identities["flat_tangent_energy"] = _identity(energy, name="flat_tangent_energy")
    s_arr = np.array(s_vals)
    observed = {
        "flat_tangent_sq_mean": float(np.mean(s_arr)),
        "flat_tangent_sq_min": float(np.min(s_arr)),
        "flat_tangent_sq_max": float(np.max(s_arr)),
    }
    if r2 <= MIN_NORM:
        notes.append("DegenerateFit: sphere-factor part of F vanishes")
        return ConditionResult(
            "Cylinder", float("inf"), float("inf"), {"c": 0.0, "r2": r2}, {"c": 0.0, "r2": r2_spread},
            DEGENERATE, len(samples), observed=observed, identities=identities, notes=notes,
            tol_check=tol, tol_const=tol_const,
        )
    c = 1.0 / r2
    for P, L, s, nF in zip(P_all, L_all, s_vals, norms):
        main.append(float(np.linalg.norm(L + c * (m - s) * P)) / (m * max(1.0, nF)))
    res = np.maximum(np.array(main), np.array(energy))
    residual_max = float(np.max(res))
    c_spread = float(np.std(1.0 / np.array(p_sq), ddof=1))

    if not r2_const:
        notes.append(f"DegenerateFit: |P|^2 is not constant (spread {r2_spread:.3e})")
        verdict = DEGENERATE
    elif residual_max <= tol and c_spread <= tol_const:
        verdict = SATISFIED
    else:
        verdict = VIOLATED
    return ConditionResult(
        "Cylinder", residual_max, _rms(res), {"c": c, "r2": r2}, {"c": c_spread, "r2": r2_spread},
        verdict, len(samples), observed=observed, identities=identities, notes=notes,
        tol_check=tol, tol_const=tol_const,
    )


def check_torus(
    spec: ImmersionSpec,
    frame: FrameSplit,
    samples: Sequence,
    tol: float = TOL_CHECK,
    tol_const: float = TOL_CONST,
    workers: int = 1,
) -> ConditionResult:
    """Test the product-of-spheres condition on the sphere ``|F|^2 = 2``.

    If the two tangential block sums agree at every sample (within ``tol``)
    the SphereMinimal branch checks ``Delta F = -(m/2) F``; otherwise the
    ProductMinimal branch recovers ``|N1|^2 = r2``, ``|N2|^2 = s2``, which
    must both equal 1, and checks the full block condition.
    """
    _check_frame(spec, frame, "torus")
    _require_samples(samples)
    evals = evaluate_samples(spec, samples, workers)
    m = spec.m
    B1, B2 = frame.first_block, frame.second_block
    E1, E2 = frame.E[:, B1], frame.E[:, B2]
    F = np.array([ev.geo.F for ev in evals])
    L = np.array([ev.geo.laplace_F for ev in evals])
    N1 = F - (F @ E2) @ E2.T
    N2 = F - (F @ E1) @ E1.T
    T = np.array([tangent_projection_norms(ev.geo, frame) for ev in evals])
    S1 = T[:, B1].sum(axis=1)
    S2 = T[:, B2].sum(axis=1)
    n1_sq = np.einsum("pa,pa->p", N1, N1)
    n2_sq = np.einsum("pa,pa->p", N2, N2)
    norm_sq = np.einsum("pa,pa->p", F, F)

    product = np.linalg.norm(L + (m - S2)[:, None] * N1 + (m - S1)[:, None] * N2, axis=1) / m
    identities = _common_identities(evals)
    identities["product_condition"] = _identity(product, tol=tol, name="product_condition")
    observed = {
        "S1_mean": float(np.mean(S1)),
        "S2_mean": float(np.mean(S2)),
        "block_gap_max": float(np.max(np.abs(S1 - S2))),
        "norm_F_sq_mean": float(np.mean(norm_sq)),
    }
    notes = []
    ambient = float(np.max(np.abs(norm_sq - 2.0))) / 2.0

    if np.all(np.abs(S1 - S2) <= tol):
        branch = SPHERE_MINIMAL
        res = np.linalg.norm(L + 0.5 * m * F, axis=1) / m
        dots = np.einsum("pa,pa->p", L, F)
        c = float(-np.sum(dots) / (m * np.sum(norm_sq))) if np.all(norm_sq > MIN_NORM) else 0.0
        c_samples = -dots / (m * np.maximum(norm_sq, MIN_NORM))
        _, c_spread, _ = recover_constants(c_samples, tol_const)
        recovered, spread = {"c": c}, {"c": c_spread}
        r2, r2_spread, r2_const = recover_constants(n1_sq, tol_const)
        s2, s2_spread, s2_const = recover_constants(n2_sq, tol_const)
        observed.update({"r2": r2, "s2": s2})
        if r2_const and s2_const and abs(r2 - 1) <= tol_const and abs(s2 - 1) <= tol_const:
            notes.append("product membership |N1| = |N2| = 1 also holds")
        if identities["product_condition"]["ok"]:
            notes.append("block condition also holds")
    else:
        branch = PRODUCT_MINIMAL
        r2, r2_spread, r2_const = recover_constants(n1_sq, tol_const)
        s2, s2_spread, s2_const = recover_constants(n2_sq, tol_const)
        # the block condition on |F|^2 = 2 forces r2 = s2 = 1
        res = np.maximum.reduce([product, np.abs(n1_sq - 1.0), np.abs(n2_sq - 1.0)])
        recovered = {"r2": r2, "s2": s2}
        spread = {"r2": r2_spread, "s2": s2_spread}
        observed["r2_plus_s2"] = r2 + s2

    residual_max = float(np.max(res))
    verdict = SATISFIED if residual_max <= tol and all(v <= tol_const for v in spread.values()) else VIOLATED
    if ambient > tol:
        notes.append(f"AmbientViolation: |F|^2 deviates from 2 by up to {2 * ambient:.3e}")
        verdict = DEGENERATE
    elif branch == PRODUCT_MINIMAL and not (r2_const and s2_const):
        notes.append("DegenerateFit: |N1|^2 or |N2|^2 is not constant")
        verdict = DEGENERATE
    return ConditionResult(
        "Torus", residual_max, _rms(res), recovered, spread, verdict, len(samples),
        branch=branch, observed=observed, identities=identities, notes=notes,
        tol_check=tol, tol_const=tol_const,
    )

"""Deterministic sampling, check orchestration and report serialization."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .conditions import (
    TOL_CHECK,
    TOL_CONST,
    ConditionResult,
    check_cylinder,
    check_sphere,
    check_torus,
)
from .expr import ImmersionSpec
from .geometry import FrameSplit

__all__ = [
    "SamplePlan",
    "CheckReport",
    "generate_samples",
    "run_check",
    "write_report",
    "read_report",
    "sha256_hex",
]

DEFAULT_COUNT = 200
DEFAULT_MARGIN = 0.05


@dataclass(frozen=True)
class SamplePlan:
    seed: int = 0
    count: int = DEFAULT_COUNT
    margin: float = DEFAULT_MARGIN
    strategy: str = "uniform_random"  # or "grid"

    def __post_init__(self):
        if self.count < 2:
            raise ValueError(f"sample count must be >= 2, got {self.count}")
        if not 0.0 <= self.margin < 0.5:
            raise ValueError(f"margin must lie in [0, 0.5), got {self.margin}")
        if self.strategy not in ("uniform_random", "grid"):
            raise ValueError(f"unknown sampling strategy {self.strategy!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return {"seed": self.seed, "count": self.count, "margin": self.margin, "strategy": self.strategy}

    @classmethod
    def from_dict(cls, d: dict) -> "SamplePlan":
        return cls(int(d["seed"]), int(d["count"]), float(d["margin"]), d["strategy"])


def _unit_point(seed: int, index: int, m: int) -> np.ndarray:
    # Philox is counter based: the stream for sample `index` sits in its own
    # counter block, so point i never depends on how many points are drawn.
    bitgen = np.random.Philox(key=seed, counter=[0, 0, 0, index])
    return np.random.Generator(bitgen).random(m)


def generate_samples(plan: SamplePlan, box) -> list[np.ndarray]:
    """Points inside ``box`` inset by ``plan.margin`` of each side.

    ``uniform_random`` keys point ``i`` by ``(seed, i)``, so the first ``k``
    points of a larger plan equal the ``count=k`` plan. ``grid`` places
    ``ceil(count ** (1/m))`` points per axis, endpoints included, and keeps
    the first ``count`` in lexicographic order.
    """
    lo = np.array([b[0] for b in box], dtype=float)
    hi = np.array([b[1] for b in box], dtype=float)
    if lo.shape != hi.shape or lo.ndim != 1 or lo.size == 0 or np.any(lo >= hi):
        raise ValueError(f"invalid box {box!r}")
    width = hi - lo
    ilo = lo + plan.margin * width
    ihi = hi - plan.margin * width
    m = lo.size
    if plan.strategy == "uniform_random":
        return [ilo + _unit_point(plan.seed, i, m) * (ihi - ilo) for i in range(plan.count)]
    per_axis = 2
    while per_axis**m < plan.count:
        per_axis += 1
    axes = [np.linspace(a, b, per_axis) for a, b in zip(ilo, ihi)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m)
    return [row.copy() for row in mesh[: plan.count]]


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _frame_dict(frame: FrameSplit | None) -> dict | None:
    if frame is None:
        return None
    d = frame.describe()
    d["E"] = frame.E.tolist()
    return d


@dataclass
class CheckReport:
    provenance: dict
    frame: dict | None
    plan: SamplePlan
    result: ConditionResult
    tolerances: dict
    engine_version: str = __version__
    residual_table: list = field(default_factory=list)

    def __post_init__(self):
        if not self.residual_table:
            self.residual_table = [
                {"identity": name, **row} for name, row in sorted(self.result.identities.items())
            ]
        else:
            self.residual_table = sorted(self.residual_table, key=lambda r: r["identity"])

    def to_dict(self) -> dict:
        return {
            "engine_version": self.engine_version,
            "provenance": self.provenance,
            "frame": self.frame,
            "plan": self.plan.to_dict(),
            "tolerances": self.tolerances,
            "result": self.result.to_dict(),
            "residual_table": self.residual_table,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        return cls(
            provenance=d["provenance"],
            frame=d["frame"],
            plan=SamplePlan.from_dict(d["plan"]),
            result=ConditionResult.from_dict(d["result"]),
            tolerances=d["tolerances"],
            engine_version=d["engine_version"],
            residual_table=list(d["residual_table"]),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, CheckReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def run_check(
    kind: str,
    spec: ImmersionSpec,
    frame: FrameSplit | None = None,
    plan: SamplePlan | None = None,
    tol: float = TOL_CHECK,
    tol_const: float = TOL_CONST,
    provenance: dict | None = None,
    workers: int = 1,
) -> CheckReport:
    """Sample the chart, run one checker and wrap the outcome in a report."""
    plan = plan or SamplePlan()
    samples = generate_samples(plan, spec.box)
    if kind == "sphere":
        result = check_sphere(spec, samples, tol, tol_const, workers)
        frame = None
    elif kind == "cylinder":
        result = check_cylinder(spec, frame, samples, tol, tol_const, workers)
    elif kind == "torus":
        result = check_torus(spec, frame, samples, tol, tol_const, workers)
    else:
        raise ValueError(f"unknown check kind {kind!r}")
    return CheckReport(
        provenance=provenance or {"source": "spec", "name": spec.name},
        frame=_frame_dict(frame),
        plan=plan,
        result=result,
        tolerances={"tol_check": tol, "tol_const": tol_const},
    )


def _fmt(x) -> str:
    return f"{x:.6g}" if isinstance(x, float) else str(x)


def _text(report: CheckReport) -> str:
    r = report.result
    src = report.provenance
    lines = [f"takacheck {report.engine_version}: {r.kind.lower()} check"]
    if src.get("source") == "catalog":
        params = ", ".join(f"{k}={_fmt(v)}" for k, v in src.get("params", {}).items())
        lines.append(f"input: catalog {src['id']}" + (f" ({params})" if params else ""))
    elif src.get("source") == "file":
        lines.append(f"input: {src['path']} (sha256 {src['sha256']})")
    else:
        lines.append(f"input: {src.get('name') or 'in-memory spec'}")
    if report.frame:
        f = report.frame
        basis = "standard basis" if f["standard_basis"] else "custom frame"
        lines.append(f"frame: {f['kind']} n={f['n']} k={f['k']} N={f['N']} ({basis})")
    p = report.plan
    lines.append(f"samples: {p.count} {p.strategy} seed={p.seed} margin={_fmt(p.margin)}")
    lines.append(f"tolerances: tol_check={_fmt(r.tol_check)} tol_const={_fmt(r.tol_const)}")
    if r.branch:
        lines.append(f"branch: {r.branch}")
    lines.append(f"residual: max={_fmt(r.residual_max)} rms={_fmt(r.residual_rms)}")
    for name, value in r.recovered.items():
        lines.append(f"recovered {name} = {_fmt(value)} (spread {_fmt(r.spread.get(name, 0.0))})")
    for name, value in r.observed.items():
        lines.append(f"observed {name} = {_fmt(value)}")
    lines.append("identities:")
    for row in report.residual_table:
        flag = "ok" if row["ok"] else "FAIL"
        lines.append(f"  {row['identity']:<28} max={_fmt(row['max'])} tol={_fmt(row['tol'])} {flag}")
    for note in r.notes:
        lines.append(f"note: {note}")
    lines.append(f"VERDICT: {r.verdict}")
    return "\n".join(lines) + "\n"


def write_report(report: CheckReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report.to_dict(), indent=2) + "\n").encode("utf-8")
    if fmt == "text":
        return _text(report).encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")


def read_report(data: bytes | str) -> CheckReport:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return CheckReport.from_dict(json.loads(data))

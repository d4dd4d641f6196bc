"""
Checking your own chart
=======================

Immersions are written in a small text format. Here we describe a sheared
right cylinder, compare the automatic-differentiation Laplacian with a
finite-difference one, rotate everything by an orthogonal matrix, and
write JSON and text reports.
"""

import numpy as np

from takacheck import FrameSplit, geometry_at, parse, run_check
from takacheck.expr import to_source, transform
from takacheck.report import SamplePlan, write_report

source = """
# the unit cylinder x^2 + y^2 = 1, parametrized along a helix
param slope = 0.3;
dim 2 -> 3;
F = (cos(x1), sin(x1), x2 + slope*x1);
box x1 in [0, 2*pi], x2 in [-1, 1];
"""
spec = parse(source, name="sheared_cylinder")
print(to_source(spec))

p = np.array([0.8, 0.2])
geo = geometry_at(spec, p)


# a crude second-difference Laplacian for comparison: the chart is not
# isometric, so use the divergence form sqrt(g)^-1 d_i (sqrt(g) g^ij d_j F)
def flux(y, h=1e-5):
    dF = np.stack([(spec(y + h * e) - spec(y - h * e)) / (2 * h) for e in np.eye(2)], axis=1)
    g = dF.T @ dF
    return np.sqrt(np.linalg.det(g)) * np.linalg.solve(g, dF.T)


h = 1e-4
div = sum((flux(p + h * e)[i] - flux(p - h * e)[i]) / (2 * h) for i, e in enumerate(np.eye(2)))
print("jet Laplacian :", geo.laplace_F)
print("finite diff.  :", div / geo.sqrt_det_g)

plan = SamplePlan(seed=11, count=100)
report = run_check("cylinder", spec, FrameSplit.cylinder(1, 1), plan)
print(write_report(report, "text").decode())

# rotating the chart and the frame together leaves the verdict and residuals alone
rng = np.random.default_rng(0)
Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
moved = run_check("cylinder", transform(spec, Q), FrameSplit.cylinder(1, 1).rotated(Q), plan)
print("rotated:", moved.result.verdict, f"{moved.result.residual_max:.2e} vs {report.result.residual_max:.2e}")

print(write_report(report, "json").decode()[:400], "...")

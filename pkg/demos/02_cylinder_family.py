"""
Flat tori winding around S^{2n-1} x R
=====================================

For sqrt(n-1) < a <= sqrt(n) the chart

    F(x) = (cos a x1, sin a x1, ..., cos a xn, sin a xn, b (x1 + ... + xn)) / sqrt(n)

is minimal in the cylinder S^{2n-1} x R once the slope b is chosen by
solve_b. The cylinder check recovers c = 1 and the flat tangent energy
|T|^2 = n - a^2.
"""

import math

import numpy as np

from takacheck import catalog, check_cylinder, solve_b
from takacheck.geometry import geometry_at, tangent_projection_norms
from takacheck.report import SamplePlan, generate_samples

plan = SamplePlan(seed=7, count=200)

for n in (2, 3):
    print(f"n = {n}: a ranges over ({math.sqrt(n - 1):.4f}, {math.sqrt(n):.4f}]")
    for a in np.linspace(math.sqrt(n - 1) + 0.02, math.sqrt(n), 5):
        spec, frame, _ = catalog.instantiate("example34", {"n": n, "a": a})
        r = check_cylinder(spec, frame, generate_samples(plan, spec.box))
        print(
            f"  a={a:.4f}  b={solve_b(n, a):.6f}  c={r.recovered['c']:.10f}  "
            f"|T|^2={r.observed['flat_tangent_sq_mean']:.6f} (n - a^2 = {n - a * a:.6f})  {r.verdict}"
        )

# the singular endpoint a = sqrt(n - 1) is rejected rather than producing b = inf
try:
    solve_b(2, 1.0)
except ValueError as exc:
    print("a = 1, n = 2:", exc)

# the tangent projections of all ambient directions add up to m
spec, frame, _ = catalog.instantiate("example34", {"n": 3, "a": 1.6})
geo = geometry_at(spec, [0.1, 0.7, 2.2])
T = tangent_projection_norms(geo, frame)
print("|T_i|^2 =", np.round(T, 6), " sum =", T.sum())

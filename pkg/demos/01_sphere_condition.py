"""
Minimal submanifolds of a round sphere
======================================

An immersion into R^N lands minimally in a sphere of curvature c exactly
when its coordinate functions are eigenfunctions: Delta F = -m c F.
We check this on a few catalog charts.
"""

import numpy as np

from takacheck import catalog, check_sphere, geometry_at
from takacheck.report import SamplePlan, generate_samples

# the Clifford torus sits in the unit 3-sphere, so Delta F = -2 F
spec, _, _ = catalog.instantiate("clifford_torus")
geo = geometry_at(spec, [0.4, 1.3])
print("F        =", geo.F)
print("Delta F  =", geo.laplace_F)
print("metric g =\n", geo.g)

samples = generate_samples(SamplePlan(seed=1, count=200), spec.box)
result = check_sphere(spec, samples)
print(f"clifford torus: {result.verdict}, c = {result.recovered['c']:.12f}, residual {result.residual_max:.2e}")

# a circle of radius rho recovers c = 1 / rho^2
for rho in (0.5, 1.0, 3.0):
    spec, _, _ = catalog.instantiate("circle", {"rho": rho})
    r = check_sphere(spec, generate_samples(SamplePlan(count=50), spec.box))
    print(f"circle rho={rho}: c = {r.recovered['c']:.6f} (1/rho^2 = {1 / rho**2:.6f})")

# negative controls: a latitude circle is not minimal in S^2, a plane has c = 0
for id in ("latitude_circle", "plane"):
    spec, _, _ = catalog.instantiate(id)
    r = check_sphere(spec, generate_samples(SamplePlan(count=200), spec.box))
    print(f"{id}: {r.verdict}, c = {r.recovered['c']:.4f}, residual {r.residual_max:.3f}")
    for note in r.notes:
        print("   note:", note)

# the mean curvature vector is normal to the surface
spec, _, _ = catalog.instantiate("round_sphere")
geo = geometry_at(spec, [1.0, 2.0])
print("H . dF =", np.round(geo.mean_curvature @ geo.dF, 15))

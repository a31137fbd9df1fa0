"""Invert an isotropic density and check it against Eddington's closed form.

rho(psi) = psi**2 has f(eps) = 4 sqrt(eps) / (sqrt(8) pi**2); the density is
recovered at a few radii by velocity-space quadrature.
"""

import math

import numpy as np

from dfforge import DensityExpansion, DensityTerm, Family, power, recover_density, synthesize_even_bounded

expansion = DensityExpansion((DensityTerm(Family.PURE_RADIAL, 0, 1.0, power(2)),))
df = synthesize_even_bounded(expansion)

eps = np.array([0.1, 0.4, 0.9])
print("eps      f(eps)            closed form")
for e, f in zip(eps, df(eps, 0.0)):
    print(f"{e:.2f}  {f:.15e}  {4 * math.sqrt(e) / (math.sqrt(8) * math.pi**2):.15e}")

print("\npsi   recovered rho        psi**2")
for psi in (0.2, 0.5, 1.0):
    est = recover_density(df, psi, 1.0)
    print(f"{psi:.1f}  {est.value:.15e}  {psi**2:.15e}")

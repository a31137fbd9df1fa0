"""Odd DFs that spin up the logarithmic model.

For each rotation-law index n the odd part of the DF is built and the mean
rotation recovered by quadrature is printed next to the prescribed law.
"""

import numpy as np

from dfforge import BinneyParams, binney_bundle, mean_vphi_law, recover_rotation

b = binney_bundle(BinneyParams(q=0.9))
v_star, R_star = 1.0, 1.0
radii = np.array([0.25, 0.5, 1.0, 2.0, 4.0])

for n in (0, 1, 2):
    odd = b.odd_df(n, v_star, R_star)
    print(f"n={n}   R     <v_phi> recovered    prescribed")
    for R in radii:
        rho = b.density(R, 0.0)
        vbar = recover_rotation(odd, b.potential(R, 0.0), R).value / (rho * R)
        print(f"      {R:<5g} {vbar:.15f}  {mean_vphi_law(n, v_star, R_star, R):.15f}")

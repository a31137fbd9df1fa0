"""Flattened bounded model: the DF is two powers of eps, one multiplying L_z**2.

The synthesized coefficients are compared with the values quoted in the
literature, which omit the 1/(4 pi G) of the density.
"""

import math

from dfforge import LyndenBellParams, lyndenbell_bundle, lyndenbell_coefficients, lyndenbell_printed_coefficients

for a in (0.0, 0.5, 2.0):
    b = lyndenbell_bundle(LyndenBellParams(a=a))
    c0, c1 = lyndenbell_coefficients(b.even_df)
    p0, p1 = lyndenbell_printed_coefficients(a)
    k = 4 * math.pi * b.params.G
    print(f"a={a:<4g} eps^7/2: {k * c0:.15e} vs {p0:.15e}   eps^13/2 Lz^2: {k * c1:.15e} vs {p1:.15e}")

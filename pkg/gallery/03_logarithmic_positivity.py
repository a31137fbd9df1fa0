"""Where does the even DF of the logarithmic potential go negative?

The density itself is positive only for q >= 1/sqrt(2); the DF scan over the
physical (E, L_z) domain shows the DF fails earlier on the prolate side.
"""

from dfforge import BinneyParams, PhysicalDomain, binney_bundle, positivity_scan

print("q        min f          at (E, Lz)              negative fraction")
for q in (0.6, 0.707107, 0.8, 0.9, 1.0, 1.05, 1.1, 1.2):
    b = binney_bundle(BinneyParams(q=q))
    rep = positivity_scan(b.even_df, PhysicalDomain(b.plane_potential, bounded=False))
    E, L = rep.argmin
    flag = "  NEGATIVE" if rep.flagged else ""
    print(f"{q:<8g} {rep.min_value:+.4e}   ({E:7.3f}, {L:+6.2f})   {rep.negative_fraction:.4f}{flag}")

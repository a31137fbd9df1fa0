"""Velocity dispersions in the plane of the logarithmic model.

Closed-form moments from the density are compared with direct integration of
the DF. The last column subtracts a prescribed rotation; where it turns
negative the law asks for more rotation than <v_phi**2> allows.
"""


from dfforge import BinneyParams, binney_bundle, dispersion_closed_form, dispersion_from_df, mean_vphi_law

b = binney_bundle(BinneyParams(q=0.8))
print("R     sigma_R^2 (closed)  sigma_R^2 (DF)     <v_phi^2>-vbar^2 with n=0 law")
for R in (0.2, 0.5, 1.0, 2.0, 5.0):
    Phi = float(b.potential(R, 0.0))
    vbar = float(mean_vphi_law(0, 1.0, 1.0, R))
    a = dispersion_closed_form(b.expansion, Phi, R, vbar, b.model.convention)
    d = dispersion_from_df(b.even_df, Phi, R, vbar)
    note = "" if a.consistent else "  (inconsistent)"
    print(f"{R:<5g} {a.sigma_R2:.12f}      {d.sigma_R2:.12f}     {a.sigma_phi2:+.12f}{note}")

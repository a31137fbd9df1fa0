"""Contour data for the even DF of the logarithmic model.

Levels step down by a factor 0.4 from the grid maximum. The output is the
same JSON the command line writes; plot the paths with any tool.
"""

import json
import sys

from dfforge import BinneyParams, ContourSpec, PhysicalDomain, binney_bundle, contour_data, mirror_mismatch

panels = []
for q in (1.0, 0.9, 0.8):
    b = binney_bundle(BinneyParams(q=q))
    cs = contour_data(b.even_df, PhysicalDomain(b.plane_potential, bounded=False), ContourSpec())
    counts = [len(lev.paths) for lev in cs.levels]
    print(f"q={q:g}: f_max={cs.f_max:.6f}, curves per level {counts}, "
          f"mirror mismatch {mirror_mismatch(cs):.1e}", file=sys.stderr)
    panels.append({"q": q, **cs.to_dict()})

if len(sys.argv) > 1:
    with open(sys.argv[1], "w") as fh:
        json.dump({"panels": panels}, fh)

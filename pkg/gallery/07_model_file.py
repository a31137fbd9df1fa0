"""Load a JSON model file, synthesize its DF and check the round trip."""

from pathlib import Path

import numpy as np

from dfforge import SynthesisRequest, eval_density, parse_model_spec, recover_density, synthesize

model = parse_model_spec((Path(__file__).parent / "models" / "mixed_general.json").read_text())
df = synthesize(SynthesisRequest(model.expansion, model.convention, model.variant))
for comp in df.describe():
    print({k: comp[k] for k in ("label", "argument", "lz_power", "edge_exponent")})

rng = np.random.default_rng(1)
for psi, R in rng.uniform([0.1, 0.1], [1.0, 2.0], size=(4, 2)):
    got = recover_density(df, psi, R).value
    want = eval_density(model.expansion, psi, R)
    print(f"psi={psi:.3f} R={R:.3f}  rho={want:.15e}  rel err {abs(got / want - 1):.1e}")

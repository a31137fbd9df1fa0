"""Acceptance criteria, each at its stated tolerance; one PASS/FAIL line per criterion."""

import json
import math

import numpy as np
from scipy.spatial import cKDTree

from conftest import record_acceptance
from dfforge.cli import main
from dfforge.coefficients import Atom, CoefficientFunction
from dfforge.model import DensityExpansion, DensityTerm, Family, eval_density
from dfforge.models import (
    BinneyParams,
    FrickeParams,
    LyndenBellParams,
    binney_bundle,
    fricke_powerlaw_bundle,
    lyndenbell_bundle,
    lyndenbell_coefficients,
    lyndenbell_printed_coefficients,
)
from dfforge.moments import dispersion_closed_form, dispersion_from_df
from dfforge.synthesis import (
    ArgumentKind,
    components_by_label,
    dejonghe_powerlaw_df,
    exp_pair,
    synthesize_even_bounded,
    synthesize_even_general,
    synthesize_even_q,
)
from dfforge.verify import PhysicalDomain, positivity_scan, recover_density, recover_rotation


def rel_err(got, want):
    got, want = np.asarray(got, float), np.asarray(want, float)
    return float(np.max(np.abs(got - want) / np.abs(want)))


def test_criterion_1_lyndenbell_coefficients():
    worst = 0.0
    for a in (0.0, 0.5, 2.0):
        b = lyndenbell_bundle(LyndenBellParams(a=a))
        got = 4 * math.pi * b.params.G * np.array(lyndenbell_coefficients(b.even_df))
        want = np.array(lyndenbell_printed_coefficients(a))
        scale = np.abs(want).max()
        err = np.where(want != 0, np.abs(got - want) / np.where(want != 0, np.abs(want), 1),
                       np.abs(got) / scale)
        worst = max(worst, float(err.max()))
    ok = worst <= 1e-12
    record_acceptance(1, "Lynden-Bell coefficients", ok, f"max rel err {worst:.2e} <= 1e-12")
    assert ok


def test_criterion_2_power_law_closed_form():
    worst = 0.0
    eps = np.linspace(0.05, 1.0, 10)
    lz = np.linspace(0.0, 1.35, 10)
    E, L = np.meshgrid(eps, lz, indexing="ij")
    for p, n in ((2.5, 0), (3.5, 1), (4.0, 1)):
        exp = DensityExpansion((DensityTerm(Family.SCALED_RADIAL, n, 1.0, CoefficientFunction((Atom(1.0, p),))),),
                               R_a=1.0)
        got = synthesize_even_q(exp)(E, L)
        want = dejonghe_powerlaw_df(p, n, E, L)
        live = want != 0
        assert np.all(got[~live] == 0)
        worst = max(worst, rel_err(got[live], want[live]))
    ok = worst <= 1e-8
    record_acceptance(2, "power-law closed form on 10x10 grids", ok, f"max rel err {worst:.2e} <= 1e-8")
    assert ok


def test_criterion_3_binney_round_trip():
    rng = np.random.default_rng(3)
    worst = 0.0
    for q in (1.0, 0.9, 0.8):
        b = binney_bundle(BinneyParams(q=q))
        for R, z in rng.uniform([0.05, 0.0], [3.0, 3.0], size=(10, 2)):
            got = recover_density(b.even_df, b.potential(R, z), R).value
            worst = max(worst, rel_err(got, b.density(R, z)))
    ok = worst <= 1e-6
    record_acceptance(3, "Binney density round trip", ok, f"max rel err {worst:.2e} <= 1e-6")
    assert ok


def test_criterion_4_positivity_boundary():
    mins = {}
    flagged = {}
    for q in (0.707107, 0.8, 1.0, 1.1):
        b = binney_bundle(BinneyParams(q=q))
        rep = positivity_scan(b.even_df, PhysicalDomain(b.plane_potential, bounded=False))
        mins[q], flagged[q] = rep.min_value, rep.flagged
    ok = (all(mins[q] >= 0 and not flagged[q] for q in (0.707107, 0.8, 1.0))
          and mins[1.1] < 0 and flagged[1.1])
    detail = ", ".join(f"q={q:g}: min {m:.3g}" for q, m in mins.items())
    record_acceptance(4, "positivity boundary", ok, detail)
    assert ok


ODD_POINTS = [(1.0, 0.0), (1.0, 0.5), (2.0, 1.0)]


def test_criterion_5_odd_recovery(capsys):
    worst = 0.0
    lines = []
    for q in (1.0, 0.9, 0.8):
        b = binney_bundle(BinneyParams(q=q))
        for n in (0, 1, 2):
            odd = b.odd_df(n, 1.0, 1.0)
            for R, z in ODD_POINTS:
                Phi = b.potential(R, z)
                got = recover_rotation(odd, Phi, R).value
                want = b.extra["rotation_target"](n, 1.0, 1.0, R, z)
                worst = max(worst, rel_err(got, want))
                parts = []
                for label in ("T1", "T2", "T3", "T4", "T5", "T6", "T7"):
                    sub = type(odd)(tuple(components_by_label(odd, label)), odd.convention)
                    parts.append(f"{label}={recover_rotation(sub, Phi, R).value:+.6e}")
                lines.append(f"q={q:g} n={n} (R,z)=({R:g},{z:g}) rel err {rel_err(got, want):.1e}: "
                             + " ".join(parts))
    with capsys.disabled():
        print("\nper-term contributions to rho R <v_phi>:")
        for line in lines:
            print("  " + line)
    ok = worst <= 1e-5
    record_acceptance(5, "odd DF rotation recovery", ok, f"max rel err {worst:.2e} <= 1e-5")
    assert ok


def moment_points(bundle):
    """5 x 5 (psi, R) pairs inside the model: five radii, five heights at each."""
    if bundle.potential is None:
        psi, R = np.meshgrid(np.linspace(0.2, 1.0, 5), np.linspace(0.2, 2.0, 5), indexing="ij")
        return list(zip(psi.ravel(), R.ravel()))
    out = []
    for R in np.linspace(0.2, 2.0, 5):
        for z in np.linspace(0.0, 2.0, 5):
            out.append((float(bundle.potential(R, z)), float(R)))
    return out


BUNDLES = ([binney_bundle(BinneyParams(q=q)) for q in (1.0, 0.9, 0.8)]
           + [lyndenbell_bundle(LyndenBellParams(a=a)) for a in (0.0, 0.5, 2.0)]
           + [fricke_powerlaw_bundle(FrickeParams(p, n)) for p, n in ((2.5, 0), (3.5, 1), (4.0, 1))])


def test_criterion_6_moment_consistency():
    worst = 0.0
    structural = True
    for b in BUNDLES:
        for psi, R in moment_points(b):
            a = dispersion_closed_form(b.expansion, psi, R, convention=b.model.convention)
            d = dispersion_from_df(b.even_df, psi, R)
            structural &= a.sigma_R2 == a.sigma_z2 and d.sigma_R2 == d.sigma_z2
            worst = max(worst, rel_err([a.sigma_R2, a.sigma_phi2], [d.sigma_R2, d.sigma_phi2]))
    ok = worst <= 1e-6 and structural
    record_acceptance(6, "moment closed form vs direct integration", ok,
                      f"max rel err {worst:.2e} <= 1e-6 over {len(BUNDLES)} models; sigma_R2 == sigma_z2: {structural}")
    assert ok


def test_criterion_7_exponential_pairs():
    worst = 0.0
    alpha, R0 = 1.3, 1.2
    for beta in (0.0, 0.7):
        for n in (0, 1, 2):
            dfac = 2**n * math.factorial(n)  # (2n)!!, equal to 1 for n = 0
            for parity, moment, rp in (("even", recover_density, 2 * n + 1), ("odd", None, 2 * n)):
                df, closed = exp_pair(n, alpha, beta, R0, parity)
                for Phi, R in ((0.2, 0.5), (1.0, 1.0), (2.5, 2.0)):
                    want = (4 * math.pi * dfac * R0 ** (2 * n + 2) * R**rp * math.exp(-alpha * Phi)
                            / (alpha * (alpha * R0**2 + beta * R * R) ** (n + 1)))
                    if parity == "even":
                        got = recover_density(df, Phi, R).value
                    else:
                        got = recover_rotation(df, Phi, R).value / R
                    worst = max(worst, rel_err(got, want), rel_err(closed(Phi, R), want))
    ok = worst <= 1e-6
    record_acceptance(7, "exponential pairs", ok, f"max rel err {worst:.2e} <= 1e-6")
    assert ok


def test_criterion_8_contour_output(tmp_path):
    out = tmp_path / "figure.json"
    assert main(["contour", "--preset", "figure", "--out", str(out)]) == 0
    panels = json.loads(out.read_text())["panels"]
    ratios = []
    for panel in panels:
        v = np.array([lev["level"] for lev in panel["levels"]])
        ratios.extend(v[1:] / v[:-1])
    ratio_err = float(np.max(np.abs(np.array(ratios) - 0.4)))
    sym = panels[0]
    assert sym["model"].endswith("q=1")
    mismatch = 0.0
    for lev in sym["levels"]:
        if not lev["paths"]:
            continue
        pts = np.concatenate([np.array(p) for p in lev["paths"]])
        d, _ = cKDTree(pts * [1.0, -1.0]).query(pts)
        mismatch = max(mismatch, float(d.max()))
    ok = len(panels) == 3 and ratio_err <= 1e-14 and mismatch <= 1e-13
    record_acceptance(8, "contour levels and q=1 symmetry", ok,
                      f"ratio deviation {ratio_err:.1e}, q=1 mirror mismatch {mismatch:.1e}")
    assert ok


def random_expansion(rng):
    """Positive coefficients with powers high enough for the boundary conditions."""
    R_a = float(rng.uniform(0.5, 3.0))
    terms = []
    for _ in range(rng.integers(1, 4)):
        family = Family.SCALED_RADIAL if rng.random() < 0.5 else Family.PURE_RADIAL
        n = int(rng.integers(0, 4))
        beta = 1.0 if n == 0 else float(rng.uniform(-0.45 / n, 1.5))
        a = math.floor(n * beta + 1.5)
        atoms = []
        for _ in range(rng.integers(1, 3)):
            p = float(a + rng.choice([0.0, 0.5, 1.0, 1.5, 2.0]))
            if not p.is_integer() and p <= a:
                p += 0.5
            atoms.append(Atom(float(rng.uniform(0.1, 2.0)), p, float(rng.choice([0.0, 0.5, 1.5]))))
        terms.append(DensityTerm(family, n, beta, CoefficientFunction(tuple(atoms))))
    return DensityExpansion(tuple(terms), R_a=R_a)


def q_epsilon_gap(R_a):
    base = DensityExpansion((DensityTerm(Family.PURE_RADIAL, 1, 1.0, CoefficientFunction((Atom(1.0, 4.0),))),))
    sc = DensityExpansion((DensityTerm(Family.SCALED_RADIAL, 1, 1.0, CoefficientFunction((Atom(1.0, 4.0),))),),
                          R_a=R_a)
    E, L = np.meshgrid([0.2, 0.6, 1.0], [0.1, 0.5, 1.0], indexing="ij")
    ref = synthesize_even_bounded(base)(E, L)
    return rel_err(synthesize_even_q(sc)(E, L), ref)


def test_criterion_9_property_suite():
    rng = np.random.default_rng(9)
    worst = 0.0
    invariants = True
    for _ in range(50):
        exp = random_expansion(rng)
        df = synthesize_even_general(exp)
        for psi, R in rng.uniform([0.05, 0.05], [1.0, 2.5], size=(2, 2)):
            got = recover_density(df, psi, R).value
            worst = max(worst, rel_err(got, eval_density(exp, psi, R)))
        E = rng.uniform(-0.5, 1.0, 20)
        L = rng.uniform(0.0, 2.0, 20)
        f = df(E, L)
        invariants &= bool(np.all(f == df(E, -L)) and np.all(f[E <= 0] == 0))
        for comp in df.components:
            if comp.argument is ArgumentKind.Q_BOUNDED:
                Q = comp.argument_value(E, L)
                invariants &= bool(np.all(comp(E, L)[Q <= 0] == 0))
    gaps = [q_epsilon_gap(R_a) for R_a in (1e2, 1e4, 1e6)]
    converges = gaps[0] > gaps[1] > gaps[2] and all(g <= 10 / R_a**2 + 1e-12
                                                    for g, R_a in zip(gaps, (1e2, 1e4, 1e6)))
    ok = worst <= 1e-6 and invariants and converges
    record_acceptance(9, "random expansions and Q-form limit", ok,
                      f"round trip max rel err {worst:.2e} <= 1e-6; parity/cutoff {invariants}; "
                      f"Q vs eps gap at R_a=1e2,1e4,1e6: {gaps[0]:.1e}, {gaps[1]:.1e}, {gaps[2]:.1e}")
    assert ok

"""Command-line interface.

Subcommands: ``synthesize``, ``eval-grid``, ``moments``, ``contour`` and
``verify``. A model comes from a JSON file (``--model``) or a built-in
reference such as ``--builtin binney:v0=1,q=0.9``.

Numbers are written with 17 significant digits and JSON keys are sorted, so
identical invocations produce identical bytes.

``verify`` exit codes: 0 when every check passes, otherwise the bitwise OR
of 4 (round trip), 8 (positivity), 16 (moments) and 32 (published
coefficients). Errors exit with 1 and usage errors with 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from dfforge.config import configure
from dfforge.contour import ContourSpec, contour_data
from dfforge.errors import DFForgeError, UndefinedMomentError
from dfforge.model import ModelDefinition, PotentialConvention, eval_density, parse_model_spec
from dfforge.models import (
    BinneyParams,
    ModelBundle,
    binney_bundle,
    load_bundle,
    lyndenbell_coefficients,
    lyndenbell_printed_coefficients,
    mean_vphi_law,
)
from dfforge.moments import dispersion_closed_form, dispersion_from_df
from dfforge.synthesis import EvenDF, SynthesisRequest, Variant, synthesize
from dfforge.verify import PhysicalDomain, ScanSpec, positivity_scan, recover_density

__all__ = ["main", "dump_json", "format_float"]

SCHEMA_VERSION = 1
EXIT_ROUND_TRIP, EXIT_POSITIVITY, EXIT_MOMENTS, EXIT_COEFFICIENTS = 4, 8, 16, 32

log = logging.getLogger("dfforge")


# {{{ output


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _scalar(o: Any) -> str:
    if o is None:
        return "null"
    if isinstance(o, (bool, np.bool_)):
        return "true" if o else "false"
    if isinstance(o, (int, np.integer)):
        return str(int(o))
    if isinstance(o, (float, np.floating)):
        return format_float(o) if math.isfinite(o) else "null"
    if isinstance(o, str):
        return json.dumps(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _is_flat(o: Any) -> bool:
    return isinstance(o, (list, tuple)) and not any(isinstance(x, (list, tuple, dict)) for x in o)


def dump_json(obj: Any, indent: int = 0) -> str:
    """JSON with sorted keys, floats at 17 significant digits, flat arrays on one line."""
    pad, end = "  " * (indent + 1), "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dump_json(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if _is_flat(obj):
            return "[" + ", ".join(_scalar(x) for x in obj) + "]"
        return "[\n" + ",\n".join(pad + dump_json(x, indent + 1) for x in obj) + "\n" + end + "]"
    return _scalar(obj)


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _csv(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_float(x) for x in r])
    return buf.getvalue()


# }}}


# {{{ model resolution


@dataclass(frozen=True)
class Target:
    name: str
    model: ModelDefinition
    variant: Variant
    df: EvenDF
    bundle: ModelBundle | None = None

    @property
    def convention(self) -> PotentialConvention:
        return self.model.convention

    def domain(self) -> PhysicalDomain | None:
        if self.bundle is None or self.bundle.potential is None:
            return None
        return PhysicalDomain(self.bundle.plane_potential, self.convention.bounded)


def _default_variant(model: ModelDefinition) -> Variant:
    return Variant.GENERAL if model.convention.bounded else Variant.UNBOUNDED_GENERAL


def resolve(args: argparse.Namespace) -> Target:
    if (args.model is None) == (args.builtin is None):
        raise SystemExit("error: give exactly one of --model or --builtin")
    if args.builtin is not None:
        bundle = load_bundle(args.builtin)
        variant = Variant(args.variant) if args.variant else bundle.variant
        df = bundle.even_df
        if variant is not bundle.variant:
            df = synthesize(SynthesisRequest(bundle.expansion, bundle.model.convention, variant))
        return Target(args.builtin, bundle.model, variant, df, bundle)
    model = parse_model_spec(Path(args.model).read_text())
    variant = Variant(args.variant or model.variant or _default_variant(model).value)
    try:
        df = synthesize(SynthesisRequest(model.expansion, model.convention, variant))
    except DFForgeError as exc:
        raise DFForgeError(f"model {model.name!r}: {exc}") from exc
    return Target(model.name, model, variant, df)


# }}}


# {{{ subcommands


def cmd_synthesize(args: argparse.Namespace) -> int:
    t = resolve(args)
    report = {
        "schema_version": SCHEMA_VERSION,
        "model": t.name,
        "variant": t.variant.value,
        "convention": t.convention.kind.value,
        "G": t.model.G,
        "components": t.df.describe(),
    }
    _write(dump_json(report) + "\n", args.out)
    return 0


def cmd_eval_grid(args: argparse.Namespace) -> int:
    t = resolve(args)
    E = np.linspace(args.e_min, args.e_max, args.e_steps)
    L = np.linspace(args.lz_min, args.lz_max, args.lz_steps)
    EE, LL = np.meshgrid(E, L, indexing="ij")
    f = np.asarray(t.df(EE, LL))
    rows = np.column_stack([EE.ravel(), LL.ravel(), f.ravel()])
    _write(_csv(("energy", "Lz", "f"), rows), args.out)
    return 0


def _vbar(args: argparse.Namespace, R: float) -> float:
    if args.rotation is None:
        return args.vbar
    n, v_star, R_star = args.rotation
    return float(mean_vphi_law(int(n), v_star, R_star, R))


def cmd_moments(args: argparse.Namespace) -> int:
    t = resolve(args)
    rows = []
    for psi in np.linspace(args.psi_min, args.psi_max, args.psi_steps):
        for R in np.linspace(args.r_min, args.r_max, args.r_steps):
            vbar = _vbar(args, float(R))
            try:
                m = dispersion_closed_form(t.model.expansion, float(psi), float(R), vbar, t.convention)
                rows.append(m.as_row())
            except UndefinedMomentError as exc:
                log.warning("%s", exc)
                rows.append((psi, R, math.nan, math.nan, vbar))
    _write(_csv(("psi", "R", "sigma_R2", "sigma_phi2", "vbar_phi"), rows), args.out)
    return 0


def _contour_spec(args: argparse.Namespace) -> ContourSpec:
    levels = tuple(float(x) for x in args.levels.split(",")) if args.levels else None
    return ContourSpec(args.e_min, args.e_max, args.e_steps, args.lz_max, args.lz_steps,
                       args.ratio, args.n_levels, levels)


def cmd_contour(args: argparse.Namespace) -> int:
    spec = _contour_spec(args)
    panels = []
    if args.preset == "figure":
        for q in (1.0, 0.9, 0.8):
            b = binney_bundle(BinneyParams(v0=1.0, q=q))
            cs = contour_data(b.even_df, PhysicalDomain(b.plane_potential, False), spec)
            panels.append({"model": f"binney:v0=1,q={q:g}", **cs.to_dict()})
    else:
        t = resolve(args)
        cs = contour_data(t.df, t.domain(), spec)
        panels.append({"model": t.name, **cs.to_dict()})
    _write(dump_json({"schema_version": SCHEMA_VERSION, "panels": panels}) + "\n", args.out)
    return 0


def _sample_points(t: Target, n: int, seed: int) -> list[tuple[float, float, float]]:
    """``(pot, R, reference density)`` at reproducible random positions."""
    rng = np.random.default_rng(seed)
    pts = []
    b = t.bundle
    for _ in range(n):
        if b is not None and b.potential is not None:
            R, z = rng.uniform(0.1, 2.0), rng.uniform(0.0, 2.0)
            pot = float(b.potential(R, z))
            ref = float(b.density(R, z)) if b.density is not None else float(
                eval_density(t.model.expansion, pot, R))
        else:
            pot, R = rng.uniform(0.1, 1.0), rng.uniform(0.1, 2.0)
            ref = float(eval_density(t.model.expansion, pot, R))
        pts.append((pot, float(R), ref))
    return pts


def cmd_verify(args: argparse.Namespace) -> int:
    t = resolve(args)
    pts = _sample_points(t, args.points, args.seed)

    rt_err = 0.0
    for pot, R, ref in pts:
        rec = recover_density(t.df, pot, R).value
        rt_err = max(rt_err, abs(rec - ref) / max(abs(ref), 1e-300))

    domain = t.domain()
    spec = ScanSpec() if domain is not None else ScanSpec(lz_max=2.0, e_max=1.0)
    pos = positivity_scan(t.df, domain, spec)

    mom_err = 0.0
    for pot, R, ref in pts:
        if not ref > 0:
            continue
        a = dispersion_closed_form(t.model.expansion, pot, R, 0.0, t.convention)
        d = dispersion_from_df(t.df, pot, R)
        for x, y in ((a.sigma_R2, d.sigma_R2), (a.sigma_phi2, d.sigma_phi2)):
            mom_err = max(mom_err, abs(x - y) / max(abs(y), 1e-300))

    checks = {
        "round_trip": rt_err <= args.tol,
        "positivity": not pos.flagged,
        "moments": mom_err <= args.tol,
    }
    report: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "model": t.name,
        "variant": t.variant.value,
        "points": len(pts),
        "tolerance": args.tol,
        "round_trip_max_rel_err": rt_err,
        "positivity": pos.to_dict(),
        "moments_max_rel_err": mom_err,
    }
    if t.bundle is not None and t.bundle.name == "lyndenbell":
        a = t.bundle.params.a
        printed = lyndenbell_printed_coefficients(a)
        G = t.model.G
        synth = tuple(4 * math.pi * G * c for c in lyndenbell_coefficients(t.df))
        err = max(abs(s - p) / abs(p) if p else abs(s) for s, p in zip(synth, printed))
        report["coefficients"] = {"printed": list(printed), "synthesized_times_4piG": list(synth),
                                  "max_rel_err": err}
        checks["coefficients"] = err <= 1e-12
    report["checks"] = checks
    code = 0
    for key, bit in (("round_trip", EXIT_ROUND_TRIP), ("positivity", EXIT_POSITIVITY),
                     ("moments", EXIT_MOMENTS), ("coefficients", EXIT_COEFFICIENTS)):
        if key in checks and not checks[key]:
            code |= bit
    report["exit_code"] = code
    _write(dump_json(report) + "\n", args.out)
    return code


# }}}


def _triple(text: str) -> tuple[float, float, float]:
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected n,v_star,R_star")
    return parts[0], parts[1], parts[2]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("model")
    src.add_argument("--model", help="JSON model specification file")
    src.add_argument("--builtin", help="built-in model, e.g. binney:v0=1,q=0.9 or lyndenbell:a=0.5")
    src.add_argument("--variant", choices=[v.value for v in Variant], help="synthesis variant")
    common.add_argument("--quad-tol", type=float, help="relative tolerance of the Abel quadrature")
    common.add_argument("--quad-max-depth", type=int, help="maximum panel bisections")
    common.add_argument("--out", help="output path (default: stdout)")

    p = argparse.ArgumentParser(prog="dfforge", description="Two-integral distribution functions.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synthesize", parents=[common], help="dump DF component metadata as JSON")
    s.set_defaults(func=cmd_synthesize)

    s = sub.add_parser("eval-grid", parents=[common], help="evaluate the DF on an (energy, Lz) grid")
    s.add_argument("--e-min", type=float, default=0.0)
    s.add_argument("--e-max", type=float, default=1.0)
    s.add_argument("--e-steps", type=int, default=11)
    s.add_argument("--lz-min", type=float, default=0.0)
    s.add_argument("--lz-max", type=float, default=1.0)
    s.add_argument("--lz-steps", type=int, default=11)
    s.set_defaults(func=cmd_eval_grid)

    s = sub.add_parser("moments", parents=[common], help="velocity dispersions on a (psi, R) grid")
    s.add_argument("--psi-min", type=float, default=0.1)
    s.add_argument("--psi-max", type=float, default=1.0)
    s.add_argument("--psi-steps", type=int, default=5)
    s.add_argument("--r-min", type=float, default=0.1)
    s.add_argument("--r-max", type=float, default=2.0)
    s.add_argument("--r-steps", type=int, default=5)
    s.add_argument("--vbar", type=float, default=0.0, help="constant mean rotation")
    s.add_argument("--rotation", type=_triple, help="rotation law n,v_star,R_star")
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("contour", parents=[common], help="isocontours of the DF as JSON")
    s.add_argument("--preset", choices=["figure"],
                   help="three logarithmic-potential panels with q = 1, 0.9, 0.8")
    s.add_argument("--e-min", type=float, default=0.0)
    s.add_argument("--e-max", type=float, default=3.0)
    s.add_argument("--e-steps", type=int, default=241)
    s.add_argument("--lz-max", type=float, default=3.0)
    s.add_argument("--lz-steps", type=int, default=241)
    s.add_argument("--ratio", type=float, default=0.4)
    s.add_argument("--n-levels", type=int, default=10)
    s.add_argument("--levels", help="explicit comma-separated levels")
    s.set_defaults(func=cmd_contour)

    s = sub.add_parser("verify", parents=[common], help="round trip, positivity and moment checks")
    s.add_argument("--points", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=1e-6)
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.quad_tol is not None:
        overrides["tol"] = args.quad_tol
    if args.quad_max_depth is not None:
        overrides["max_depth"] = args.quad_max_depth
    try:
        with configure(**overrides):
            return args.func(args)
    except DFForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 ok, 1 validation failure, 2 usage error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import jacobi, riem_compare, structures as st, tightness
from .flow import DomainExit, StepFailure
from .modelio import default_probes, resolve_model

_MODEL_CHOICES = ("heisenberg", "overtwisted", "standard", "kcontact",
                  "radial", "perturbed")


def _add_model_args(sub):
    sub.add_argument("model", nargs="?", choices=_MODEL_CHOICES,
                     help="built-in model name (or use --file)")
    sub.add_argument("--file", help="structure definition file (JSON/TOML)")
    sub.add_argument("--kappa", type=float, help="curvature for kcontact")
    sub.add_argument("--eps", type=float, help="perturbation size for perturbed")
    sub.add_argument("--alpha", help="radial profile, e.g. poly:1 or trig:1,0.5,0")
    sub.add_argument("--beta", help="radial profile, e.g. poly:0,0,0.5")
    sub.add_argument("--rmax-domain", type=float, dest="rmax_domain",
                     help="domain radius for radial models")


def _model(args) -> st.StructureSpec:
    return resolve_model(args.model, args.file, args.kappa, args.eps,
                         args.alpha, args.beta, args.rmax_domain)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="reebtube",
        description="Tightness-radius analysis of tubes around Reeb orbits of "
                    "contact sub-Riemannian structures.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check frame normalization identities")
    _add_model_args(v)
    v.add_argument("--tol", type=float, default=1e-8)

    j = sub.add_parser("jacobi", help="trace one geodesic and dump the trace CSV")
    _add_model_args(j)
    j.add_argument("--z", type=float, default=0.0)
    j.add_argument("--theta", type=float, default=0.0)
    j.add_argument("--rmax", type=float, default=3.0)
    j.add_argument("--out", default="trace.csv")

    a = sub.add_parser("analyze", help="full per-orbit tightness report (JSON)")
    _add_model_args(a)
    a.add_argument("--nz", type=int, default=8)
    a.add_argument("--ntheta", type=int, default=32)
    a.add_argument("--rmax", type=float, default=4.0)
    a.add_argument("--out", default="-", help="report path or - for stdout")
    a.add_argument("--disk", help="also write the disk-boundary polyline CSV")

    c = sub.add_parser("compare", help="model comparison tables")
    c.add_argument("--table", choices=("kleft", "ot"), required=True)
    c.add_argument("--format", choices=("markdown", "csv"), default="markdown")
    return ap


def cmd_validate(args) -> int:
    s = _model(args)
    probes = default_probes(s)
    rep = st.validate_normalization(s, probes)
    print(f"structure: {s.name}")
    print(f"max violation: {rep.max_violation:.3e} at probe "
          f"({rep.worst_probe[0]:.3f}, {rep.worst_probe[1]:.3f}, "
          f"{rep.worst_probe[2]:.3f})")
    print(f"  reeb pairing |c12^0 + 1|: {rep.reeb_pairing:.3e}")
    print(f"  reeb closed  |c_i0^0|:    {rep.reeb_closed:.3e}")
    print(f"  traceless    |c01^1+c02^2|: {rep.traceless:.3e}")
    if not rep.passed(args.tol):
        print(f"FAIL (tolerance {args.tol:g})")
        return 1
    print("OK")
    return 0


def cmd_jacobi(args) -> int:
    s = _model(args)
    trace = jacobi.jacobi_trace(s, z=args.z, theta=args.theta, r_max=args.rmax)
    trace.write_csv(args.out)
    jet = jacobi.check_initial_jet(trace)
    fs = jacobi.first_singular_radius(trace)
    print(f"trace written to {args.out} ({len(trace.r)} samples)")
    print("initial jet (w_t, w_t', w_t'', w_t''', w_z, w_z'):")
    print("  values:    " + " ".join(f"{v:+.3e}" for v in jet.jet))
    print("  deviations:" + " ".join(f"{v:.3e}" for v in jet.deviations))
    if fs.found:
        print(f"first singular radius: {fs.r:.10f}")
    else:
        print(f"no singular radius up to r = {fs.horizon:g}")
    return 0


def cmd_analyze(args) -> int:
    s = _model(args)
    report = tightness.analyze_orbit(s, n_z=args.nz, n_theta=args.ntheta,
                                     r_max=args.rmax)
    text = report.to_json()
    if args.out == "-":
        print(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(f"report written to {args.out}")
    if args.disk:
        boundary = tightness.disk_boundary(s, r_max=args.rmax)
        boundary.write_csv(args.disk)
        print(f"disk boundary written to {args.disk} "
              f"(closure defect {boundary.closure_defect:.3e})")
    return 0


def cmd_compare(args) -> int:
    if args.table == "kleft":
        rows = riem_compare.kleft_table()
    else:
        rows = [riem_compare.ot_table_row()]
    if args.format == "markdown":
        sys.stdout.write(riem_compare.table_markdown(rows))
    else:
        sys.stdout.write(riem_compare.table_csv(rows))
    return 0


_COMMANDS = {"validate": cmd_validate, "jacobi": cmd_jacobi,
             "analyze": cmd_analyze, "compare": cmd_compare}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, FileNotFoundError) as exc:
        ap.exit(2, f"usage error: {exc}\n")
    except (StepFailure, DomainExit, RuntimeError,
            tightness.NotOvertwistedWithinHorizon) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

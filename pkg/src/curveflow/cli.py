"""Command-line entry point: verification suites and data emission.

Exit codes: 0 all checks pass, 1 a check fails, 2 usage error, 3 a zero test
was undecided.  All options can also be set through environment variables
prefixed CURVEFLOW_ (e.g. CURVEFLOW_SEED=1).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

import sympy as sp

from . import eulersys, invariants, liealg, liftcurve, symcore, thermostate
from .eulersys import ALL_CASES, HCase, case_from_tag

SCHEMA = 1

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_UNDECIDED = 3


class UsageError(ValueError):
    pass


def _env(name: str, default=None):
    return os.environ.get(f"CURVEFLOW_{name.upper()}", default)


def _rational(text: str) -> sp.Rational:
    try:
        return sp.Rational(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"expected a rational number, got {text!r}: {exc}")


def _build_case(tag: str, args) -> HCase:
    """Case with CLI-bound parameters, symbolic where unspecified."""
    params = {}
    if tag in (HCase.LINEAR, HCase.QUADRATIC):
        if args.lam is not None:
            params["lam_val"] = _rational(args.lam)
    if tag in (HCase.POWER, HCase.EXP):
        if args.lam1 is not None:
            params["lam1_val"] = _rational(args.lam1)
        if args.lam2 is not None:
            params["lam2_val"] = _rational(args.lam2)
    try:
        return case_from_tag(tag, **params)
    except eulersys.InvalidCaseParameter as exc:
        raise UsageError(str(exc))


def _emit(payload: dict, out_path: str | None):
    text = json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _status_exit(payload: dict) -> int:
    if payload.get("undecided"):
        return EXIT_UNDECIDED
    return EXIT_PASS if payload.get("pass") else EXIT_FAIL


# --- subcommand payload builders ---------------------------------------------

def cmd_symmetries(case: HCase) -> dict:
    sys_e = eulersys.build_system(case)
    entries = []
    undecided = False
    for X in eulersys.generators(case):
        rep = eulersys.is_symmetry(X, sys_e)
        undecided |= rep.undecided
        entries.append({
            "name": X.name,
            "statuses": list(rep.statuses),
            "residuals": [symcore.pprint(r) for r in rep.residuals],
            "pass": rep.passed,
        })
    payload = {
        "schema": SCHEMA,
        "command": "symmetries",
        "case": case.tag,
        "generators": entries,
        "pass": all(e["pass"] for e in entries),
        "undecided": undecided,
    }
    if case.tag == HCase.LINEAR:
        variants = {}
        for label, X in eulersys.linear_x9_variants(case.params[0]).items():
            variants[label] = eulersys.is_symmetry(X, sys_e).passed
        payload["x9_variants"] = variants
    return payload


_SERIES_DIMS = {
    HCase.GENERIC: [5, 2, 0],
    HCase.CONST: [9, 5, 1, 0],
    HCase.LINEAR: [9, 5, 1, 0],
    HCase.QUADRATIC: [8, 4, 0],
    HCase.POWER: [6, 3, 0],
    HCase.EXP: [6, 3, 0],
    HCase.LOG: [6, 3, 0],
}

_KERNEL_DIMS = {
    HCase.GENERIC: 1, HCase.CONST: 3, HCase.LINEAR: 3, HCase.QUADRATIC: 3,
    HCase.POWER: 1, HCase.EXP: 1, HCase.LOG: 1,
}


def cmd_algebra(case: HCase) -> dict:
    A = liealg.algebra(case)
    series = liealg.derived_series(A)
    dims = [B.dim for B in series]
    kernel = liealg.kernel_theta(A)
    images = [liealg.theta(X) for X in A.fields]
    expected_thermo = liealg.thermo_part(case)
    theta_ok = liealg.span_equal(
        [Y for Y in images if not Y.is_zero()], expected_thermo)
    payload = {
        "schema": SCHEMA,
        "command": "algebra",
        "case": case.tag,
        "derived_series_dims": dims,
        "derived_series": [[X.name for X in B.fields] for B in series],
        "solvable": liealg.is_solvable(A),
        "kernel_dim": len(kernel),
        "kernel": [X.name for X in kernel],
        "theta_span_matches": theta_ok,
        "pass": (dims == _SERIES_DIMS[case.tag]
                 and len(kernel) == _KERNEL_DIMS[case.tag]
                 and theta_ok and liealg.is_solvable(A)),
    }
    return payload


def cmd_thermo(family_id: str, args) -> dict:
    if family_id not in thermostate.ALL_FAMILIES:
        raise UsageError(f"unknown family {family_id!r}; "
                         f"expected one of {sorted(thermostate.ALL_FAMILIES)}")
    family = thermostate.ALL_FAMILIES[family_id]()
    leg = family.legendrian_residual()
    tang = family.tangency_residuals()
    form = thermostate.kappa(family)
    cross_zero = symcore.is_zero(form.q_rs)
    payload = {
        "schema": SCHEMA,
        "command": "thermo",
        "family": family_id,
        "p_of_rho": symcore.pprint(family.p_of_rho),
        "T_of_s": symcore.pprint(family.T_of_s),
        "legendrian_residual": symcore.pprint(leg),
        "tangency_residuals": [symcore.pprint(r) for r in tang],
        "kappa": {"q_rr": symcore.pprint(form.q_rr),
                  "q_rs": symcore.pprint(form.q_rs),
                  "q_ss": symcore.pprint(form.q_ss)},
        "kappa_cross_term_zero": cross_zero,
        "pass": (symcore.is_zero(leg) and cross_zero
                 and all(symcore.is_zero(r) for r in tang)),
    }
    return payload


def _parse_ratio(text: str) -> thermostate.RatioKind:
    if text == "irrational":
        return thermostate.RatioKind.irrational()
    if text.startswith("rational:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError("ratio format: irrational | rational:<m>:<k>")
        try:
            return thermostate.RatioKind.rational(int(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise UsageError(str(exc))
    raise UsageError("ratio format: irrational | rational:<m>:<k>")


def cmd_admissible(args) -> dict:
    if args.gamma is None or len(args.gamma) != 4:
        raise UsageError("--gamma needs exactly 4 values (gamma1..gamma4)")
    g1, g2, g3, g4 = (Fraction(_rational(x)) for x in args.gamma)
    c1 = Fraction(_rational(args.c1))
    c2 = Fraction(_rational(args.c2))
    s_max = Fraction(_rational(args.s0))
    ratio = _parse_ratio(args.ratio)
    verdict = thermostate.admissible_theorem2(g1, g2, g3, g4, c1, c2, s_max, ratio)
    failures = [] if verdict else thermostate.theorem2_failures(
        g1, g2, g3, g4, c1, c2, s_max, ratio)
    payload = {
        "schema": SCHEMA,
        "command": "admissible",
        "verdict": verdict,
        "violated_conditions": failures,
        "pass": True,  # the command answers a question; it does not assert
    }
    if args.sweep:
        checked, disagreements = thermostate.consistency_sweep(
            args.sweep, seed=args.seed)
        payload["sweep"] = {"checked": checked,
                            "disagreements": len(disagreements)}
        payload["pass"] = not disagreements
    return payload


def _parse_xi(text: str | None):
    if not text:
        return None
    return [_rational(v) if v.lstrip("+-").replace("/", "").isdigit()
            else sp.sympify(v) for v in text.split(",")]


def cmd_invariants(case: HCase, args) -> dict:
    payload = {"schema": SCHEMA, "command": "invariants", "case": case.tag}
    basis = invariants.kinematic_basis(case)
    kin = {J.name: invariants.is_kinematic_invariant(J, case)
           for J in basis.invariants}
    der = {d.name: invariants.derivation_is_invariant(d, case, "kinematic")
           for d in basis.derivations}
    count = invariants.independent_count(list(basis.invariants), 1, case,
                                         seed=args.seed)
    payload["kinematic"] = {"invariants": kin, "derivations": der,
                            "independent_order1": count}
    ok = all(kin.values()) and all(der.values()) and count == 4
    if args.euler:
        xi = _parse_xi(args.xi)
        rep = invariants.euler_report(case, xi)
        payload["euler"] = rep
        flagged = sorted(
            [n for n, v in rep["invariants"].items() if v["status"] == "fail"]
            + [n for n, v in rep["derivations"].items() if v["status"] == "fail"])
        payload["euler_flagged"] = flagged
        payload["undecided"] = any(
            v["status"] == "undecided"
            for v in list(rep["invariants"].values()) + list(rep["derivations"].values()))
    payload["pass"] = ok
    return payload


_LIFT_DEFAULTS = {
    # (params for _build_case, z0, branch) chosen inside each case's domain
    HCase.CONST: (1.0, "+"),
    HCase.LINEAR: (0.0, "+"),
    HCase.QUADRATIC: (8 * math.cos(0.6) ** 2, "-"),
    HCase.POWER: (1e-4, "+"),
    HCase.EXP: (math.cos(1.0) / 0.15, "-"),
    HCase.LOG: (1.0, "+"),
}


def _default_case_params(tag: str, args):
    if tag == HCase.QUADRATIC and args.lam is None:
        args.lam = "1/32"
    if tag == HCase.LINEAR and args.lam is None:
        args.lam = "1/2"
    if tag in (HCase.POWER, HCase.EXP):
        if args.lam1 is None:
            args.lam1 = "1"
        if args.lam2 is None:
            args.lam2 = "11/3" if tag == HCase.POWER else "3/20"


def _load_curve(args) -> liftcurve.PlaneCurve:
    if args.curve == "circle":
        tau_max = float(args.tau_max) if args.tau_max else 2 * math.pi
        return liftcurve.unit_circle(int(args.n), tau_max)
    import numpy as np
    data = np.loadtxt(args.curve, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] < 3:
        raise UsageError("curve file needs columns tau,x,y")
    return liftcurve.curve_from_xy(data[:, 0], data[:, 1], data[:, 2])


def cmd_lift(case_tag: str, args) -> dict:
    _default_case_params(case_tag, args)
    case = _build_case(case_tag, args)
    if case.tag == HCase.GENERIC:
        raise UsageError("lift requires one of the six explicit height cases")
    curve = _load_curve(args)
    defaults = _LIFT_DEFAULTS[case.tag]
    z0 = float(args.z0) if args.z0 is not None else defaults[0]
    branch = args.branch or defaults[1]
    tol = float(args.tol) if args.tol else (1e-6 if case.tag == HCase.POWER else 1e-8)
    try:
        result = liftcurve.lift(case, curve, z0, branch)
    except (liftcurve.LiftDomainError, liftcurve.IrregularCurve) as exc:
        return {"schema": SCHEMA, "command": "lift", "case": case.tag,
                "error": str(exc), "pass": False}
    report = liftcurve.verify(case, result, curve)
    if args.out:
        liftcurve.write_csv(result, args.out)
    h_key = "h_residual_rel" if case.tag == HCase.POWER else "h_residual"
    return {
        "schema": SCHEMA,
        "command": "lift",
        "case": case.tag,
        "branch": branch,
        "z0": z0,
        "samples": int(result.tau.size),
        "csv": args.out,
        "max_ode_residual": report["max_ode_residual"],
        "h_residual": report["h_residual"],
        "h_residual_rel": report["h_residual_rel"],
        "tolerance": tol,
        "pass": report["max_ode_residual"] < tol and report[h_key] < tol,
    }


def cmd_report(args) -> dict:
    """Full verification suite (the conjunction of all primary checks)."""
    sections = {}
    for tag in ALL_CASES:
        case = case_from_tag(tag)
        sections.setdefault("symmetries", {})[tag] = cmd_symmetries(case)
        sections.setdefault("algebra", {})[tag] = cmd_algebra(case)
    for fam in sorted(thermostate.ALL_FAMILIES):
        sections.setdefault("thermo", {})[fam] = cmd_thermo(fam, args)
    checked, disagreements = thermostate.consistency_sweep(
        int(args.sweep or 1000), seed=args.seed)
    sections["admissible_sweep"] = {
        "checked": checked, "disagreements": len(disagreements),
        "pass": not disagreements,
    }
    args.euler = True
    for tag in ALL_CASES:
        case = case_from_tag(tag)
        sections.setdefault("invariants", {})[tag] = cmd_invariants(case, args)
    lift_args = argparse.Namespace(
        curve="circle", n=args.n, tau_max=None, z0=None, branch=None,
        out=None, tol=None, lam=None, lam1=None, lam2=None)
    for tag in (HCase.CONST, HCase.LINEAR, HCase.QUADRATIC,
                HCase.EXP, HCase.LOG):
        sections.setdefault("lift", {})[tag] = cmd_lift(
            tag, argparse.Namespace(**vars(lift_args)))
    power_args = argparse.Namespace(**vars(lift_args))
    power_args.tau_max = "0.4"
    sections["lift"][HCase.POWER] = cmd_lift(HCase.POWER, power_args)

    def collect(node):
        if isinstance(node, dict):
            if "pass" in node:
                yield node["pass"]
            for v in node.values():
                yield from collect(v)

    payload = {"schema": SCHEMA, "command": "report", "sections": sections,
               "pass": all(collect(sections))}
    payload["undecided"] = any(
        isinstance(sec, dict) and any(
            isinstance(v, dict) and v.get("undecided") for v in sec.values())
        for sec in sections.values())
    return payload


# --- argument parsing ---------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curveflow",
        description="Verification suites for the curve Euler system: symmetry "
                    "tables, Lie-algebra structure, thermodynamic states, "
                    "differential invariants and curve lifting.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--json", dest="json_out", default=_env("json"),
                       help="write the JSON report here instead of stdout")
        p.add_argument("--seed", type=int, default=int(_env("seed", "0")),
                       help="seed for all sampled points")

    def add_case_params(p):
        p.add_argument("--lambda", dest="lam", default=_env("lambda"))
        p.add_argument("--lambda1", dest="lam1", default=_env("lambda1"))
        p.add_argument("--lambda2", dest="lam2", default=_env("lambda2"))

    p = sub.add_parser("symmetries", help="verify a case's generator table")
    p.add_argument("case", choices=ALL_CASES)
    add_common(p)
    add_case_params(p)

    p = sub.add_parser("algebra", help="derived series, solvability, theta and its kernel")
    p.add_argument("case", choices=ALL_CASES)
    add_common(p)
    add_case_params(p)

    p = sub.add_parser("thermo", help="verify a thermodynamic state family")
    p.add_argument("family", choices=sorted(thermostate.ALL_FAMILIES))
    add_common(p)

    p = sub.add_parser("admissible", help="admissibility predicate (and optional sweep)")
    p.add_argument("--gamma", nargs=4, default=_env("gamma", "").split() or None)
    p.add_argument("--c1", default=_env("c1"), required=_env("c1") is None)
    p.add_argument("--c2", default=_env("c2"), required=_env("c2") is None)
    p.add_argument("--s0", default=_env("s0"), required=_env("s0") is None)
    p.add_argument("--ratio", default=_env("ratio", "irrational"))
    p.add_argument("--sweep", type=int, default=int(_env("sweep", "0")))
    add_common(p)

    p = sub.add_parser("invariants", help="verify kinematic (and Euler) invariant bases")
    p.add_argument("case", choices=ALL_CASES)
    p.add_argument("--euler", action="store_true",
                   default=_env("euler", "") == "1")
    p.add_argument("--xi", default=_env("xi"),
                   help="comma-separated coefficients of the thermodynamic field")
    add_common(p)
    add_case_params(p)

    p = sub.add_parser("lift", help="lift a plane curve and write the tau,l,z,a CSV")
    p.add_argument("case", choices=[c for c in ALL_CASES if c != HCase.GENERIC])
    p.add_argument("--curve", default=_env("curve", "circle"),
                   help="'circle' or a CSV file with columns tau,x,y")
    p.add_argument("--n", type=int, default=int(_env("n", "2001")))
    p.add_argument("--tau-max", dest="tau_max", default=_env("tau_max"))
    p.add_argument("--z0", default=_env("z0"))
    p.add_argument("--branch", choices=("+", "-"), default=_env("branch"))
    p.add_argument("--tol", default=_env("tol"))
    p.add_argument("--out", default=_env("out"),
                   help="write the tau,l,z,a CSV here")
    add_common(p)
    add_case_params(p)

    p = sub.add_parser("report", help="full primary verification suite")
    p.add_argument("--sweep", type=int, default=int(_env("sweep", "1000")))
    p.add_argument("--n", type=int, default=int(_env("n", "2001")))
    add_common(p)

    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        if args.command == "symmetries":
            payload = cmd_symmetries(_build_case(args.case, args))
        elif args.command == "algebra":
            payload = cmd_algebra(_build_case(args.case, args))
        elif args.command == "thermo":
            payload = cmd_thermo(args.family, args)
        elif args.command == "admissible":
            payload = cmd_admissible(args)
        elif args.command == "invariants":
            payload = cmd_invariants(_build_case(args.case, args), args)
        elif args.command == "lift":
            payload = cmd_lift(args.case, args)
        elif args.command == "report":
            payload = cmd_report(args)
        else:  # pragma: no cover - argparse enforces the choices
            raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except symcore.UndecidedZeroTest as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    _emit(payload, args.json_out)
    return _status_exit(payload)


def main():  # console-script entry point
    sys.exit(run())


if __name__ == "__main__":
    main()

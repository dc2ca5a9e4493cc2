"""End-to-end acceptance checks, one test (and one pass/fail line under
`pytest -v`) per criterion:

1. symmetry generator tables for all seven height cases, with negative controls
2. derived series chains with exact middle spans; solvability
3. thermodynamic projection: image spans and kernel dimensions
4. state admissibility: symbolic residuals and a seeded 1000-point sweep
5. kinematic/Euler invariants, invariant derivations, independence count
6. numeric lifting of the unit circle for the six concrete cases
7. (secondary component) plot rendering smoke test
"""

import math
import time

import numpy as np
import pytest

from curveflow.eulersys import (build_system, case_from_tag, generators,
                                is_symmetry, linear_x9_variants)
from curveflow.invariants import (DerivationCandidate, derivation_is_invariant,
                                  euler_report, independent_count,
                                  is_kinematic_invariant, kinematic_basis)
from curveflow.liealg import (algebra, derived_series, is_solvable,
                              kernel_theta, span_equal, theta, thermo_part)
from curveflow.liftcurve import lift, unit_circle, verify, write_csv
from curveflow.symcore import is_zero
from curveflow.thermostate import ALL_FAMILIES, consistency_sweep, kappa

ALL_TAGS = ("generic", "const", "linear", "quadratic", "power", "exp", "log")


def _case(tag):
    if tag == "power":
        return case_from_tag(tag, lam1_val=1, lam2_val="11/3")
    return case_from_tag(tag)


def _named(fields, *names):
    by_name = {X.name: X for X in fields}
    return [by_name[n] for n in names]


def test_criterion_1_symmetry_tables():
    start = time.monotonic()
    for tag in ALL_TAGS:
        case = case_from_tag(tag)
        sys = build_system(case)
        for X in generators(case):
            rep = is_symmetry(X, sys)
            assert rep.passed, (tag, X.name, rep.statuses)
    # the two printed variants of the linear-case X9 disagree; exactly the
    # section form is a symmetry
    linear_sys = build_system(case_from_tag("linear"))
    variants = linear_x9_variants()
    assert is_symmetry(variants["section"], linear_sys).passed
    assert not is_symmetry(variants["appendix"], linear_sys).passed
    # negative controls: case-specific generators moved to a foreign system
    controls = [
        ("const", "X9", "quadratic"),
        ("linear", "X9", "const"),
        ("quadratic", "X7", "const"),
        ("power", "X6", "exp"),
        ("exp", "X6", "log"),
        ("log", "X6", "power"),
    ]
    for src_tag, name, dst_tag in controls:
        (X,) = _named(generators(case_from_tag(src_tag)), name)
        rep = is_symmetry(X, build_system(case_from_tag(dst_tag)))
        assert not rep.passed, (src_tag, name, dst_tag)
    assert time.monotonic() - start < 300.0


def test_criterion_2_derived_series():
    expected = {
        "generic": ([5, 2, 0], [("X2", "X3")]),
        "const": ([9, 5, 1, 0], [("X1", "X2", "X3", "X6", "X7"), ("X6",)]),
        "linear": ([9, 5, 1, 0], [("X1", "X2", "X3", "X6", "X7"), ("X6",)]),
        "quadratic": ([8, 4, 0], [("X2", "X3", "X7", "X8")]),
        "power": ([6, 3, 0], [("X1", "X2", "X3")]),
        "exp": ([6, 3, 0], [("X1", "X2", "X3")]),
        "log": ([6, 3, 0], [("X1", "X2", "X3")]),
    }
    for tag, (dims, middles) in expected.items():
        A = algebra(case_from_tag(tag))
        chain = derived_series(A)
        assert [step.dim for step in chain] == dims, tag
        gens = A.fields
        for step, names in zip(chain[1:], middles):
            assert span_equal(step.fields, _named(gens, *names)), (tag, names)
        assert is_solvable(A), tag


def test_criterion_3_theta_consistency():
    kernel_dims = {"generic": 1, "const": 3, "linear": 3, "quadratic": 3,
                   "power": 1, "exp": 1, "log": 1}
    for tag in ALL_TAGS:
        case = case_from_tag(tag)
        A = algebra(case)
        image = [theta(X) for X in A.fields]
        assert span_equal(image, thermo_part(case)), tag
        assert len(kernel_theta(A)) == kernel_dims[tag], tag


def test_criterion_4_thermodynamics():
    for name, builder in ALL_FAMILIES.items():
        family = builder()
        assert is_zero(family.legendrian_residual()), name
        assert is_zero(kappa(family).q_rs), name
    checked, disagreements = consistency_sweep(1000, seed=0)
    assert checked == 1000
    assert disagreements == []


def test_criterion_5_invariants():
    for tag in ALL_TAGS:
        case = _case(tag)
        basis = kinematic_basis(case)
        for J in basis.invariants:
            assert is_kinematic_invariant(J, case), (tag, J.name)
        for nabla in basis.derivations:
            assert derivation_is_invariant(nabla, case, "kinematic"), \
                (tag, nabla.name)
    generic = case_from_tag("generic")
    order1 = list(kinematic_basis(generic).invariants)
    assert independent_count(order1, 1, generic) == 4
    # displayed Euler bases with symbolic xi; the power and exp tables carry
    # an exponent mismatch as printed, which must be flagged, not hidden
    expected_flags = {
        "generic": ([], []),
        "const": ([], []),
        "linear": ([], []),
        "quadratic": ([], []),
        "power": (["rho*u^2*a^(xi4*(xi2-2)/(2*xi5))", "u*a^(-xi2/2)"],
                  ["a^(1-xi2/2)*D_t"]),
        "exp": (["rho*u*exp(xi2*xi4*a/(2*xi5))", "u*exp(-xi2*a/2)"],
                ["exp(-xi2*a/2)*D_t"]),
        "log": ([], []),
    }
    for tag in ALL_TAGS:
        rep = euler_report(_case(tag))
        inv_fails = sorted(n for n, v in rep["invariants"].items()
                           if v["status"] != "pass")
        der_fails = sorted(n for n, v in rep["derivations"].items()
                           if v["status"] != "pass")
        want_inv, want_der = expected_flags[tag]
        assert inv_fails == sorted(want_inv), (tag, inv_fails)
        assert der_fails == sorted(want_der), (tag, der_fails)


def acceptance_lifts():
    """The six concrete cases with their acceptance parameters on the
    built-in unit circle."""
    lam_q = 1 / 32
    return [
        ("const", case_from_tag("const"), 1.0, "+", 2 * math.pi),
        ("linear", case_from_tag("linear", lam_val="1/2"), 0.0, "+", 2 * math.pi),
        ("quadratic", case_from_tag("quadratic", lam_val="1/32"),
         math.cos(0.6) ** 2 / (4 * lam_q), "-", 2 * math.pi),
        ("power", case_from_tag("power", lam1_val=1, lam2_val="11/3"),
         1e-4, "+", 0.4),
        ("exp", case_from_tag("exp", lam1_val=1, lam2_val="3/20"),
         math.cos(1.0) / 0.15, "-", 2 * math.pi),
        ("log", case_from_tag("log"), 1.0, "+", 2 * math.pi),
    ]


def test_criterion_6_lifting():
    residuals = {}
    for tag, case, z0, branch, tau_max in acceptance_lifts():
        # solver tolerances are tightened below their defaults so the
        # grid-dependent part of the error is measurable for the halving check
        kwargs = ({"ode_rtol": 1e-12} if tag == "power"
                  else {"root_tol": 1e-14})
        for n in (501, 1001, 2001):
            curve = unit_circle(n, tau_max=tau_max)
            rep = verify(case, lift(case, curve, z0, branch=branch, **kwargs),
                         curve)
            residuals[tag, n] = rep["max_ode_residual"]
            if n != 2001:
                continue
            if tag == "power":
                assert rep["max_ode_residual"] < 1e-6, tag
                assert rep["h_residual_rel"] < 1e-6, tag
            else:
                assert rep["max_ode_residual"] < 1e-8, tag
                assert rep["h_residual"] < 1e-8, tag
        # grid halving: compare coarse grids, where truncation error dominates;
        # residuals already at the solver noise floor (root-finder or ODE
        # integrator tolerance, < 1e-9) cannot shrink further and pass outright
        coarse, fine = residuals[tag, 501], residuals[tag, 1001]
        assert fine < 1e-9 or coarse / fine >= 8.0, (tag, coarse, fine)


def test_criterion_7_secondary_plots(tmp_path):
    pytest.importorskip("liftplots")
    from liftplots.render import render
    jobs = [("quadratic", "relation"), ("log", "lifted3d")]
    params = {tag: entry for entry in acceptance_lifts()
              for tag in [entry[0]]}
    for tag, kind in jobs:
        _, case, z0, branch, tau_max = params[tag]
        curve = unit_circle(501, tau_max=tau_max)
        result = lift(case, curve, z0, branch=branch)
        csv_path = tmp_path / f"{tag}.csv"
        write_csv(result, str(csv_path))
        out = tmp_path / f"{tag}_{kind}.png"
        render(kind, str(csv_path), str(out))
        assert out.exists() and out.stat().st_size > 0
        dz = np.diff(result.z)
        assert np.all(dz >= 0) or np.all(dz <= 0)

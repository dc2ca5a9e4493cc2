"""Differential invariants: kinematic/Euler invariance tests, invariant
derivations and independence counting."""

import pytest
import sympy as sp

from curveflow import invariants
from curveflow.eulersys import case_from_tag
from curveflow.invariants import (DegenerateCoefficients, DerivationCandidate,
                                  InvariantCandidate, derivation_is_invariant,
                                  euler_algebra, euler_basis, euler_report,
                                  independent_count, is_euler_invariant,
                                  is_kinematic_invariant, kinematic_basis,
                                  thermo_symmetry_field)
from curveflow.symcore import jet, sym

t, a = sym("t"), sym("a")
u, rho, s = sym("u"), sym("rho"), sym("s")
xi2, xi4 = sym("xi2"), sym("xi4")
u_a, rho_a = jet("u", 0, 1), jet("rho", 0, 1)
s_t, s_a = jet("s", 1, 0), jet("s", 0, 1)


def _inv(e, order=None):
    e = sp.sympify(e)
    from curveflow.jetspace import max_order
    return InvariantCandidate(e, order if order is not None else max_order(e))


class TestCandidateValidation:
    def test_rejects_irrational_jet_dependence(self):
        with pytest.raises(ValueError):
            InvariantCandidate(sp.sqrt(u_a), 1)
        with pytest.raises(ValueError):
            InvariantCandidate(sp.sin(s_a), 1)

    def test_rejects_understated_order(self):
        with pytest.raises(ValueError):
            InvariantCandidate(jet("u", 0, 2), 1)

    def test_fiber_powers_allowed(self):
        InvariantCandidate(rho ** (xi4 / xi2) * u_a, 1)  # rational along fibers


class TestKinematicInvariance:
    def test_material_entropy_rate_const(self):
        assert is_kinematic_invariant(_inv(s_t + u * s_a), case_from_tag("const"))

    def test_velocity_not_invariant_const(self):
        assert not is_kinematic_invariant(_inv(u), case_from_tag("const"))

    def test_velocity_invariant_generic(self):
        assert is_kinematic_invariant(_inv(u), case_from_tag("generic"))

    def test_displayed_bases(self):
        for tag in ("generic", "const", "quadratic", "log"):
            case = case_from_tag(tag)
            for J in kinematic_basis(case).invariants:
                assert is_kinematic_invariant(J, case), (tag, J.name)

    def test_basis_shapes(self):
        assert len(kinematic_basis(case_from_tag("generic")).invariants) == 8
        assert len(kinematic_basis(case_from_tag("quadratic")).invariants) == 6


class TestEulerInvariance:
    def test_shifted_entropy_density(self):
        case = case_from_tag("generic")
        assert is_euler_invariant(_inv((s - xi2 / xi4) * rho), case)

    def test_entropy_rate_density(self):
        assert is_euler_invariant(_inv(s_t * rho), case_from_tag("generic"))

    def test_plain_entropy_density_fails(self):
        assert not is_euler_invariant(_inv(s * rho), case_from_tag("generic"))

    def test_degenerate_xi(self):
        case = case_from_tag("generic")
        with pytest.raises(DegenerateCoefficients):
            thermo_symmetry_field(case, (0, 0, 0, 0))
        with pytest.raises(DegenerateCoefficients):
            euler_basis(case, (1, 1, 1, 0))  # xi4 = 0 degenerates the display

    def test_xi_arity(self):
        with pytest.raises(ValueError):
            thermo_symmetry_field(case_from_tag("generic"), (1, 2, 3))

    def test_euler_algebra_dim(self):
        assert euler_algebra(case_from_tag("generic")).dim == 2
        assert euler_algebra(case_from_tag("const")).dim == 4

    def test_exp_report_flags_as_printed_failures(self):
        rep = euler_report(case_from_tag("exp"))
        failed = sorted(n for n, v in rep["invariants"].items()
                        if v["status"] == "fail")
        assert failed == ["rho*u*exp(xi2*xi4*a/(2*xi5))", "u*exp(-xi2*a/2)"]
        assert rep["derivations"]["exp(-xi2*a/2)*D_t"]["status"] == "fail"
        assert rep["derivations"]["D_a"]["status"] == "pass"

    def test_exp_passes_when_xi2_matches_exponent(self):
        lam2 = sym("lambda2")
        xi = (sym("xi1"), lam2, sym("xi3"), sym("xi4"), sym("xi5"))
        rep = euler_report(case_from_tag("exp"), xi)
        assert all(v["status"] == "pass" for v in rep["invariants"].values())


class TestDerivations:
    def test_spatial_derivation_generic(self):
        assert derivation_is_invariant(DerivationCandidate(0, 1, "D_a"),
                                       case_from_tag("generic"), "kinematic")

    def test_material_derivative_const(self):
        assert derivation_is_invariant(DerivationCandidate(1, u, "D_t+u*D_a"),
                                       case_from_tag("const"), "kinematic")

    def test_time_derivation_fails_const(self):
        assert not derivation_is_invariant(DerivationCandidate(1, 0, "D_t"),
                                           case_from_tag("const"), "kinematic")

    def test_selector_validation(self):
        with pytest.raises(ValueError):
            derivation_is_invariant(DerivationCandidate(0, 1, "D_a"),
                                    case_from_tag("generic"), "thermo")
        with pytest.raises(ValueError):
            derivation_is_invariant(DerivationCandidate(0, 1, "D_a"),
                                    case_from_tag("generic"), "kinematic", basis=[])


class TestIndependentCount:
    def test_generic_order1_is_4(self):
        basis = kinematic_basis(case_from_tag("generic")).invariants
        assert independent_count(list(basis), 1, case_from_tag("generic")) == 4

    def test_const_order1_is_4(self):
        basis = kinematic_basis(case_from_tag("const")).invariants
        assert independent_count(list(basis), 1, case_from_tag("const")) == 4

    def test_duplicates_do_not_inflate(self):
        case = case_from_tag("generic")
        basis = list(kinematic_basis(case).invariants)
        doubled = basis + [_inv(2 * u_a)]
        assert independent_count(doubled, 1, case) == 4

    def test_no_pure_order_k_members(self):
        case = case_from_tag("generic")
        assert independent_count([_inv(u)], 1, case) == 0

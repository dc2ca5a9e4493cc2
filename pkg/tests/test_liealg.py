"""Lie-algebra structure: brackets, derived series, solvability, the
thermodynamic projection and its kernel."""

import pytest
import sympy as sp

from curveflow.eulersys import case_from_tag, generators
from curveflow.jetspace import PointField
from curveflow.liealg import (AlgebraBasis, NotClosed, NotProjectable,
                              ThermoField, algebra, bracket, derived_series,
                              is_solvable, kernel_theta, span_contains,
                              span_equal, span_rank, theta, thermo_bracket,
                              thermo_part)
from curveflow.symcore import is_zero, sym

t, a = sym("t"), sym("a")
u, p, rho, s, T = sym("u"), sym("p"), sym("rho"), sym("s"), sym("T")


def by_name(case_tag):
    return {X.name: X for X in generators(case_from_tag(case_tag))}


class TestBracket:
    def test_pressure_translation_vs_scaling(self):
        gens = by_name("generic")
        b = bracket(gens["X2"], gens["X5"])
        assert all(is_zero(b.coeffs[n] - gens["X2"].coeffs[n]) for n in b.coeffs)

    def test_time_translation_vs_boost(self):
        gens = by_name("const")
        b = bracket(gens["X1"], gens["X7"])
        assert all(is_zero(b.coeffs[n] - gens["X6"].coeffs[n]) for n in b.coeffs)

    def test_disjoint_coordinates(self):
        gens = by_name("generic")
        assert bracket(gens["X4"], gens["X5"]).is_zero()

    def test_antisymmetry_and_jacobi(self):
        gens = list(by_name("const").values())
        X, Y, Z = gens[0], gens[6], gens[8]
        anti = bracket(X, Y) + bracket(Y, X)
        assert anti.is_zero()
        jac = (bracket(X, bracket(Y, Z)) + bracket(Y, bracket(Z, X))
               + bracket(Z, bracket(X, Y)))
        assert jac.is_zero()


class TestSpans:
    def test_rank(self):
        gens = by_name("generic")
        assert span_rank([gens["X2"], gens["X5"]]) == 2
        assert span_rank([gens["X2"], 2 * gens["X2"]]) == 1

    def test_contains(self):
        gens = by_name("generic")
        combo = 3 * gens["X2"] + sp.Rational(1, 2) * gens["X3"]
        assert span_contains([gens["X2"], gens["X3"]], combo)
        assert not span_contains([gens["X2"], gens["X3"]], gens["X5"])

    def test_dependent_basis_rejected(self):
        gens = by_name("generic")
        with pytest.raises(ValueError):
            AlgebraBasis([gens["X2"], 2 * gens["X2"]])


class TestDerivedSeries:
    def test_generic_chain(self):
        gens = by_name("generic")
        series = derived_series(algebra(case_from_tag("generic")))
        assert [B.dim for B in series] == [5, 2, 0]
        assert span_equal(series[1].fields, [gens["X2"], gens["X3"]])

    def test_const_chain(self):
        gens = by_name("const")
        series = derived_series(algebra(case_from_tag("const")))
        assert [B.dim for B in series] == [9, 5, 1, 0]
        assert span_equal(series[1].fields,
                          [gens[n] for n in ("X1", "X2", "X3", "X6", "X7")])
        assert span_equal(series[2].fields, [gens["X6"]])

    def test_quadratic_chain(self):
        gens = by_name("quadratic")
        series = derived_series(algebra(case_from_tag("quadratic")))
        assert [B.dim for B in series] == [8, 4, 0]
        assert span_equal(series[1].fields,
                          [gens[n] for n in ("X2", "X3", "X7", "X8")])

    def test_solvable(self):
        for tag in ("generic", "quadratic", "power"):
            assert is_solvable(algebra(case_from_tag(tag)))
        assert is_solvable(AlgebraBasis([PointField({"t": 1}, name="X1")]))

    def test_not_closed(self):
        bad = AlgebraBasis([PointField({"t": 1}, name="A"),
                            PointField({"t": t ** 2}, name="B")])
        with pytest.raises(NotClosed):
            derived_series(bad)


class TestTheta:
    def test_scaling_projects_to_y4(self):
        gens = by_name("generic")
        img = theta(gens["X5"])
        want = {"p": p, "rho": rho, "s": -s, "T": 0}
        assert all(is_zero(img.coeffs[n] - want[n]) for n in want)

    def test_time_translation_projects_to_zero(self):
        assert theta(by_name("generic")["X1"]).is_zero()

    def test_const_x9_projection(self):
        img = theta(by_name("const")["X9"])
        assert is_zero(img.coeffs["p"] + 2 * p)
        assert is_zero(img.coeffs["s"] - s)

    def test_not_projectable(self):
        with pytest.raises(NotProjectable):
            theta(PointField({"p": t}, name="bad"))

    def test_homomorphism(self):
        gens = by_name("const")
        for X, Y in ((gens["X2"], gens["X5"]), (gens["X8"], gens["X9"])):
            lhs = theta(bracket(X, Y))
            rhs = thermo_bracket(theta(X), theta(Y))
            assert all(is_zero(lhs.coeffs[n] - rhs.coeffs[n]) for n in lhs.coeffs)


class TestKernelTheta:
    def test_generic_kernel(self):
        kern = kernel_theta(algebra(case_from_tag("generic")))
        assert len(kern) == 1
        assert span_equal(kern, [by_name("generic")["X1"]])

    def test_const_kernel(self):
        gens = by_name("const")
        kern = kernel_theta(algebra(case_from_tag("const")))
        assert len(kern) == 3
        assert span_equal(kern, [gens["X1"], gens["X6"], gens["X7"]])

    def test_kernel_is_ideal(self):
        A = algebra(case_from_tag("quadratic"))
        kern = kernel_theta(A)
        for X in A.fields:
            for K in kern:
                assert span_contains(kern, bracket(X, K)), (X.name, K.name)


class TestThermoPart:
    def test_span_matches_theta_images(self):
        for tag in ("generic", "const", "log"):
            A = algebra(case_from_tag(tag))
            images = [Y for Y in (theta(X) for X in A.fields) if not Y.is_zero()]
            assert span_equal(images, thermo_part(case_from_tag(tag))), tag

    def test_log_basis_contains_joint_scaling(self):
        names = {Y.name: Y for Y in thermo_part(case_from_tag("log"))}
        assert is_zero(names["Y5"].coeffs["p"] - p)
        assert is_zero(names["Y5"].coeffs["rho"] - rho)

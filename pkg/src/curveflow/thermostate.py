"""Thermodynamic states: Poisson bracket, Legendrian check, internal energy,
admissibility form and the one-dimensional-symmetry state families."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import sympy as sp

from . import symcore
from .symcore import Expr, p, rho, s, sym

T = sym("T")
THERMO_SYMS = (p, rho, s, T)

gamma1, gamma2, gamma3, gamma4, gamma5 = (sym(f"gamma{i}") for i in range(1, 6))
C1, C2, s0 = sym("C1"), sym("C2"), sym("s0")
lam2 = sym("lambda2")


class NonThermodynamicVariable(ValueError):
    pass


class DegenerateFamily(ValueError):
    pass


class IncompatibleFamily(ValueError):
    """Cross-derivatives of the internal energy disagree."""


class ThermoDomainError(ValueError):
    """Evaluation outside the physical domain (rho <= 0 or T undefined)."""


def poisson_bracket(F: Expr, G: Expr) -> Expr:
    """Bracket of the symplectic structure pairing (s, T) and (rho, p) with
    {s, T} = 1 and {rho, p} = rho^2."""
    F, G = sp.sympify(F), sp.sympify(G)
    for e in (F, G):
        extra = e.free_symbols - set(THERMO_SYMS) - {
            sm for sm in e.free_symbols if symcore.TABLE.kind(sm) == "param"}
        if extra:
            raise NonThermodynamicVariable(f"non-thermodynamic variables {extra} in {e}")
    out = (sp.diff(F, s) * sp.diff(G, T) - sp.diff(F, T) * sp.diff(G, s)
           + rho ** 2 * (sp.diff(F, rho) * sp.diff(G, p) - sp.diff(F, p) * sp.diff(G, rho)))
    return sp.expand(out)


@dataclass(frozen=True)
class StateFamily:
    """State surface {p = p(rho), T = T(s)} with its defining symmetry field."""

    case_id: str
    gamma: tuple
    c1: Expr
    c2: Expr
    s_max: Expr
    p_of_rho: Expr
    T_of_s: Expr
    # coefficients of the symmetry field on (p, s, T, rho): Z = z_p d_p +
    # z_s d_s + z_T d_T + z_rho d_rho
    z_coeffs: tuple = ()

    @property
    def relations(self) -> tuple[Expr, Expr]:
        return (p - self.p_of_rho, T - self.T_of_s)

    def legendrian_residual(self) -> Expr:
        return poisson_bracket(*self.relations)

    def tangency_residuals(self) -> tuple[Expr, Expr]:
        """Symmetry field applied to both relations, reduced modulo them."""
        if not self.z_coeffs:
            return (sp.Integer(0), sp.Integer(0))
        z_p, z_s, z_T, z_rho = self.z_coeffs
        out = []
        for rel, scale in zip(self.relations, (sp.Integer(1), self.T_of_s / self.c2)):
            r = (z_p * sp.diff(rel, p) + z_s * sp.diff(rel, s)
                 + z_T * sp.diff(rel, T) + z_rho * sp.diff(rel, rho))
            r = r.subs({p: self.p_of_rho, T: self.T_of_s})
            # dividing by the power-law factor keeps the residual rational
            r = sp.cancel(sp.powsimp(sp.expand(r / scale), force=True))
            out.append(r)
        return tuple(out)


@dataclass(frozen=True)
class QuadraticForm2:
    """Restriction of the admissibility form to the state surface, in the
    coordinates (rho, s)."""

    q_rr: Expr
    q_rs: Expr
    q_ss: Expr

    def matrix_at(self, family: "StateFamily", rho_val, s_val) -> tuple[float, float, float]:
        subs = {rho: sp.nsimplify(rho_val), s: sp.nsimplify(s_val)}
        vals = []
        for q in (self.q_rr, self.q_rs, self.q_ss):
            v = _real_eval(q.subs(subs))
            vals.append(v)
        return tuple(vals)


def _real_eval(e: Expr) -> float:
    """Numeric value with real-root semantics for rational powers of negative
    bases (odd denominators)."""
    e = sp.sympify(e)

    def fix(expr):
        if expr.is_Pow:
            base, exp = expr.args
            base = fix(base)
            if exp.is_Rational and not exp.is_Integer:
                return sp.real_root(base ** sp.Rational(exp.p), exp.q)
            return base ** exp
        if expr.args:
            return expr.func(*[fix(arg) for arg in expr.args])
        return expr

    val = fix(e).evalf(30)
    if not val.is_real:
        raise ThermoDomainError(f"non-real value {val}")
    return float(val)


def epsilon_system(g1, g2, g3, g4) -> tuple[Expr, Expr]:
    """The two internal-energy PDE left-hand sides for the general symmetry
    field; epsilon is an undefined function of (rho, s)."""
    g1, g2, g3, g4 = map(sp.sympify, (g1, g2, g3, g4))
    if g4.is_zero:
        raise DegenerateFamily("gamma4 must be nonzero in the general case")
    eps = sp.Function("epsilon")(rho, s)
    eq1 = (g4 * rho * sp.diff(eps, rho, 2) + (g2 - g4 * s) * sp.diff(eps, rho, s)
           + g4 * sp.diff(eps, rho) - g1 / rho ** 2)
    eq2 = ((g2 - g4 * s) * sp.diff(eps, s, 2) + g4 * rho * sp.diff(eps, rho, s)
           - g3 * sp.diff(eps, s))
    return eq1, eq2


def epsilon_residuals(family: StateFamily, g1, g2, g3, g4) -> tuple[Expr, Expr]:
    """Substitute the family's internal energy into the PDE system."""
    eps_expr = internal_energy(family)
    eps = sp.Function("epsilon")(rho, s)
    out = []
    for eq in epsilon_system(g1, g2, g3, g4):
        r = eq.subs(eps, eps_expr).doit()
        out.append(sp.powsimp(sp.expand(r), force=True))
    return tuple(out)


def _generic_branch(e: Expr) -> Expr:
    """Replace every Piecewise by its first (generic-parameter) branch."""
    e = sp.sympify(e)
    if not e.atoms(sp.Piecewise):
        return e
    return e.replace(sp.Piecewise, lambda *branches: branches[0][0])


def internal_energy(f: StateFamily) -> Expr:
    """epsilon(rho, s) with d(eps)/ds = T(s) and d(eps)/drho = p(rho)/rho^2;
    additive constant fixed to zero.  Symbolic exponents are integrated on the
    generic branch (exponent != -1)."""
    if not symcore.is_zero(f.legendrian_residual()):
        raise IncompatibleFamily("defining relations do not Poisson-commute")
    eps_rho = f.p_of_rho / rho ** 2
    eps_s = f.T_of_s
    if not symcore.is_zero(sp.diff(eps_rho, s) - sp.diff(eps_s, rho)):
        raise IncompatibleFamily("cross-derivatives of the internal energy differ")
    return _generic_branch(sp.integrate(eps_rho, rho) + sp.integrate(eps_s, s))


import functools


@functools.lru_cache(maxsize=None)
def kappa(f: StateFamily) -> QuadraticForm2:
    """Admissibility form restricted to the surface.  For p = p(rho),
    T = T(s) the cross term cancels identically."""
    internal_energy(f)  # validates compatibility
    T_s = f.T_of_s
    p_r = f.p_of_rho
    eps_rho = p_r / rho ** 2
    dTi_ds = sp.diff(1 / T_s, s)
    # kappa = d(1/T)*d(eps) - rho^-2 d(p/T)*d(rho), symmetric product
    q_ss = sp.expand(dTi_ds * T_s)
    q_rs = sp.expand(sp.Rational(1, 2) * dTi_ds * eps_rho
                     - sp.Rational(1, 2) * rho ** -2 * sp.diff(p_r / T_s, s))
    q_rr = sp.expand(-rho ** -2 * sp.diff(p_r / T_s, rho))
    return QuadraticForm2(q_rr=q_rr, q_rs=sp.together(q_rs), q_ss=q_ss)


def is_admissible_at(f: StateFamily, rho_val, s_val) -> bool:
    """Negative definiteness of kappa at a point (leading minors test).
    The point must lie in the physical domain: rho > 0 and T(s) > 0."""
    rho_num = float(rho_val)
    if rho_num <= 0:
        raise ThermoDomainError("density must be positive")
    T_val = _real_eval(f.T_of_s.subs(s, sp.nsimplify(s_val)))
    if T_val <= 0:
        raise ThermoDomainError("temperature must be positive")
    form = kappa(f)
    q_rr, q_rs, q_ss = form.matrix_at(f, rho_val, s_val)
    det = q_rr * q_ss - q_rs ** 2
    return q_rr < 0 and det > 0


# --- Theorem-2 admissibility predicate --------------------------------------

@dataclass(frozen=True)
class RatioKind:
    """Arithmetic nature of gamma3/gamma4; cannot be inferred from floats."""

    kind: str  # "irrational" | "rational"
    m: int | None = None
    k: int | None = None

    @classmethod
    def irrational(cls) -> "RatioKind":
        return cls("irrational")

    @classmethod
    def rational(cls, m: int, k: int) -> "RatioKind":
        if k == 0:
            raise ValueError("zero denominator")
        frac = Fraction(m, k)
        return cls("rational", frac.numerator, frac.denominator)


def admissible_theorem2(g1, g2, g3, g4, c1, c2, s_max, ratio_kind: RatioKind) -> bool:
    """Enumerated admissibility predicate for the general state family."""
    g1, g2, g3, g4, c1, c2, s_max = (Fraction(x) if not isinstance(x, Fraction) else x
                                     for x in (g1, g2, g3, g4, c1, c2, s_max))
    if g4 == 0:
        raise DegenerateFamily("gamma4 must be nonzero")
    if ratio_kind.kind == "rational":
        if Fraction(g3) / Fraction(g4) != Fraction(ratio_kind.m, ratio_kind.k):
            raise ValueError("declared rational ratio disagrees with gamma3/gamma4")
    if not (s_max < g2 / g4 and c1 > 0 and g1 / g4 < 0):
        return False
    if ratio_kind.kind == "irrational":
        return g3 > 0 and g4 > 0 and c2 > 0
    m, k = ratio_kind.m, ratio_kind.k
    if Fraction(m, k) <= 0:
        return False
    if k % 2 == 0:
        return g4 > 0 and c2 > 0
    if m % 2 == 0:
        return c2 > 0
    return c2 * g4 > 0


# --- family constructors ----------------------------------------------------

def state_general(g1=gamma1, g2=gamma2, g3=gamma3, g4=gamma4,
                  c1=C1, c2=C2, s_max=s0) -> StateFamily:
    g1, g2, g3, g4 = map(sp.sympify, (g1, g2, g3, g4))
    if g4.is_zero:
        raise DegenerateFamily("gamma4 must be nonzero")
    return StateFamily(
        case_id="general",
        gamma=(g1, g2, g3, g4),
        c1=sp.sympify(c1), c2=sp.sympify(c2), s_max=sp.sympify(s_max),
        p_of_rho=c1 * rho - g1 / g4,
        T_of_s=c2 * (g2 - g4 * s) ** (-g3 / g4),
        z_coeffs=(g1 + g4 * p, g2 - g4 * s, g3 * T, g4 * rho),
    )


def state_case3(g1=gamma1, g2=gamma2, g3=gamma3, g4=gamma4, g5=gamma5,
                c1=C1, c2=C2, s_max=s0) -> StateFamily:
    g1, g2, g3, g4, g5 = map(sp.sympify, (g1, g2, g3, g4, g5))
    if g4.is_zero or g5.is_zero:
        raise DegenerateFamily("gamma4 and gamma5 must be nonzero for case 3")
    return StateFamily(
        case_id="case3",
        gamma=(g1, g2, g3, g4, g5),
        c1=sp.sympify(c1), c2=sp.sympify(c2), s_max=sp.sympify(s_max),
        p_of_rho=c1 * rho ** (g5 / g4) - g1 / g5,
        T_of_s=c2 * (g2 - g5 * s) ** (-g3 / g5),
        z_coeffs=(g1 + g5 * p, g2 - g5 * s, g3 * T, g4 * rho),
    )


def state_case4(lam2_val=lam2, g1=gamma1, g2=gamma2, g3=gamma3, g4=gamma4,
                g5=gamma5, c1=C1, c2=C2, s_max=s0) -> StateFamily:
    lam2_val, g1, g2, g3, g4, g5 = map(sp.sympify, (lam2_val, g1, g2, g3, g4, g5))
    d_p = 2 * lam2_val * g4 + g5
    d_T = (lam2_val - 2) * g4 + g5
    for d, label in ((d_p, "2*lambda2*gamma4 + gamma5"),
                     (d_T, "(lambda2 - 2)*gamma4 + gamma5")):
        if d.is_zero:
            raise DegenerateFamily(f"degenerate exponent denominator {label} = 0")
    if g5.is_zero:
        raise DegenerateFamily("gamma5 must be nonzero for case 4")
    return StateFamily(
        case_id="case4",
        gamma=(g1, g2, g3, g4, g5),
        c1=sp.sympify(c1), c2=sp.sympify(c2), s_max=sp.sympify(s_max),
        p_of_rho=c1 * rho ** (g5 / d_p) - g1 / g5,
        T_of_s=c2 * (d_T * s - g2) ** (-g3 / d_T),
        z_coeffs=(g1 + g5 * p, g2 - d_T * s, g3 * T, d_p * rho),
    )


def state_case6(g1=gamma1, g2=gamma2, g3=gamma3, g4=gamma4, g5=gamma5,
                c1=C1, c2=C2, s_max=s0) -> StateFamily:
    """Log case.  The symmetry field uses the s-scaling generator of this
    case's thermodynamic algebra (gamma4 multiplies s*d_s; the section text
    prints rho*d_rho, which is not in the algebra and is not tangent)."""
    g1, g2, g3, g4, g5 = map(sp.sympify, (g1, g2, g3, g4, g5))
    if g4.is_zero or g5.is_zero:
        raise DegenerateFamily("gamma4 and gamma5 must be nonzero for case 6")
    return StateFamily(
        case_id="case6",
        gamma=(g1, g2, g3, g4, g5),
        c1=sp.sympify(c1), c2=sp.sympify(c2), s_max=sp.sympify(s_max),
        p_of_rho=c1 * rho - g1 / g5,
        T_of_s=c2 * (g2 + g4 * s) ** (g3 / g4),
        z_coeffs=(g1 + g5 * p, g2 + g4 * s, g3 * T, g5 * rho),
    )


ALL_FAMILIES = {
    "general": state_general,
    "case3": state_case3,
    "case4": state_case4,
    "case6": state_case6,
}


# --- sweep used by the acceptance consistency check -------------------------

def _sample_fraction(rng, lo=-4, hi=4) -> Fraction:
    num = rng.randint(lo * 6, hi * 6)
    while num == 0:
        num = rng.randint(lo * 6, hi * 6)
    return Fraction(num, rng.choice((1, 2, 3, 4, 6)))

#: conditions of Theorem 2 that constrain the admissibility form itself; the
#: gamma1/gamma4 sign only constrains the pressure offset and has no kappa
#: witness at a point.
KAPPA_CONDITIONS = ("ratio", "C1", "C2")


def theorem2_failures(g1, g2, g3, g4, c1, c2, s_max, ratio_kind: RatioKind) -> list[str]:
    """Names of the conditions an inadmissible configuration violates."""
    g1, g2, g3, g4, c1, c2, s_max = map(Fraction, (g1, g2, g3, g4, c1, c2, s_max))
    bad = []
    if not s_max < g2 / g4:
        bad.append("s0")
    if not c1 > 0:
        bad.append("C1")
    if not g1 / g4 < 0:
        bad.append("gamma1")
    if ratio_kind.kind == "irrational":
        if not (g3 > 0 and g4 > 0):
            bad.append("ratio")
        if not c2 > 0:
            bad.append("C2")
        return bad
    m, k = ratio_kind.m, ratio_kind.k
    if Fraction(m, k) <= 0:
        bad.append("ratio")
        return bad
    if k % 2 == 0:
        if not g4 > 0:
            bad.append("ratio")
        if not c2 > 0:
            bad.append("C2")
    elif m % 2 == 0:
        if not c2 > 0:
            bad.append("C2")
    else:
        if not c2 * g4 > 0:
            bad.append("C2")
    return bad


def consistency_sweep(n_configs: int, seed: int = 0, points_per_config: int = 6):
    """Compare admissible_theorem2 against pointwise negative definiteness.

    Returns (checked, disagreements): a disagreement is either a predicate-true
    configuration with a non-admissible sampled point, or a configuration that
    fails a kappa-relevant sign condition yet is admissible at every sampled
    point.
    """
    import random

    rng = random.Random(seed)
    checked = 0
    disagreements = []
    family_sym = state_general()
    form_sym = kappa(family_sym)  # symbolic parameters, computed once
    param_syms = (gamma1, gamma2, gamma3, gamma4, C1, C2)
    while checked < n_configs:
        g4v = _sample_fraction(rng)
        m = rng.randint(1, 6) * rng.choice((1, -1))
        k = rng.randint(1, 6)
        g3v = Fraction(m, k) * g4v
        g1v, g2v = _sample_fraction(rng), _sample_fraction(rng)
        c1v, c2v = _sample_fraction(rng), _sample_fraction(rng)
        smaxv = g2v / g4v - _sample_fraction(rng)
        ratio = RatioKind.rational(*(Fraction(g3v, g4v).as_integer_ratio()))
        verdict = admissible_theorem2(g1v, g2v, g3v, g4v, c1v, c2v, smaxv, ratio)
        fails = theorem2_failures(g1v, g2v, g3v, g4v, c1v, c2v, smaxv, ratio)
        subs_params = dict(zip(param_syms, (sp.Rational(x) for x in
                                            (g1v, g2v, g3v, g4v, c1v, c2v))))
        q_rr_c = form_sym.q_rr.subs(subs_params)
        q_rs_c = form_sym.q_rs.subs(subs_params)
        q_ss_c = form_sym.q_ss.subs(subs_params)
        T_c = family_sym.T_of_s.subs(subs_params)
        verdicts = []
        for _ in range(points_per_config):
            rho_val = sp.Rational(Fraction(rng.randint(1, 40), rng.randint(1, 10)))
            span = _sample_fraction(rng)
            s_val = sp.Rational(smaxv - abs(span))  # stays in (-inf, s0]
            try:
                pt = {rho: rho_val, s: s_val}
                if _real_eval(T_c.subs(pt)) <= 0:
                    raise ThermoDomainError("temperature must be positive")
                q_rr = _real_eval(q_rr_c.subs(pt))
                q_rs = _real_eval(q_rs_c.subs(pt))
                q_ss = _real_eval(q_ss_c.subs(pt))
                verdicts.append(q_rr < 0 and q_rr * q_ss - q_rs ** 2 > 0)
            except ThermoDomainError:
                verdicts.append(False)
        checked += 1
        if verdict and not all(verdicts):
            disagreements.append(("true-but-point-fails", g1v, g2v, g3v, g4v, c1v, c2v, smaxv))
        elif (not verdict and "s0" not in fails
              and any(c in KAPPA_CONDITIONS for c in fails) and all(verdicts)):
            # a violated sign condition must show up pointwise, but only when
            # the ray s <= s0 < gamma2/gamma4 lies on the surface's own branch
            disagreements.append(("false-but-no-witness", g1v, g2v, g3v, g4v, c1v, c2v, smaxv))
    return checked, disagreements

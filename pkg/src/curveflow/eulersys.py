"""The Euler system restricted to a curve, reduction modulo the system,
symmetry verification and the per-case generator tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import sympy as sp

from . import symcore
from .jetspace import JetVar, PointField, jet_vars_in, max_order, prolong, total_derivative
from .symcore import Expr, a, jet, p, rho, s, sym, t, u

g = sym("g")
k_cond = sym("k")  # thermal conductivity, not the Theorem-2 integer
lam = sym("lambda")
lam1 = sym("lambda1")
lam2 = sym("lambda2")
T = sym("T")

PRINCIPAL_FIELDS = ("u", "rho", "s")


class InvalidCaseParameter(ValueError):
    pass


@dataclass(frozen=True)
class HCase:
    """Shape of the height function h(a); one of the seven classified cases."""

    tag: str
    params: tuple = ()

    GENERIC = "generic"
    CONST = "const"
    LINEAR = "linear"
    QUADRATIC = "quadratic"
    POWER = "power"
    EXP = "exp"
    LOG = "log"

    @classmethod
    def generic(cls, h: Expr | None = None) -> "HCase":
        h = sp.sympify(h) if h is not None else sp.Function("h")(a)
        return cls(cls.GENERIC, (h,))

    @classmethod
    def const(cls) -> "HCase":
        return cls(cls.CONST)

    @classmethod
    def linear(cls, lam_val=lam) -> "HCase":
        lam_val = sp.sympify(lam_val)
        if lam_val.is_zero:
            raise InvalidCaseParameter("linear case needs lambda != 0")
        return cls(cls.LINEAR, (lam_val,))

    @classmethod
    def quadratic(cls, lam_val=lam) -> "HCase":
        lam_val = sp.sympify(lam_val)
        if lam_val.is_zero:
            raise InvalidCaseParameter("quadratic case needs lambda != 0")
        return cls(cls.QUADRATIC, (lam_val,))

    @classmethod
    def power(cls, lam1_val=lam1, lam2_val=lam2) -> "HCase":
        lam2_val = sp.sympify(lam2_val)
        if lam2_val in (sp.Integer(0), sp.Integer(1), sp.Integer(2)):
            raise InvalidCaseParameter("power case needs lambda2 not in {0, 1, 2}")
        return cls(cls.POWER, (sp.sympify(lam1_val), lam2_val))

    @classmethod
    def exponential(cls, lam1_val=lam1, lam2_val=lam2) -> "HCase":
        lam2_val = sp.sympify(lam2_val)
        if lam2_val.is_zero:
            raise InvalidCaseParameter("exponential case needs lambda2 != 0")
        return cls(cls.EXP, (sp.sympify(lam1_val), lam2_val))

    @classmethod
    def log(cls) -> "HCase":
        return cls(cls.LOG)

    def h(self) -> Expr:
        """Height as a function of arc length a."""
        if self.tag == self.GENERIC:
            return self.params[0]
        if self.tag == self.CONST:
            return sym("h0")
        if self.tag == self.LINEAR:
            return self.params[0] * a
        if self.tag == self.QUADRATIC:
            return self.params[0] * a ** 2
        if self.tag == self.POWER:
            return self.params[0] * a ** self.params[1]
        if self.tag == self.EXP:
            return self.params[0] * sp.exp(self.params[1] * a)
        if self.tag == self.LOG:
            return sp.log(a)
        raise ValueError(self.tag)

    def h_prime(self) -> Expr:
        return sp.diff(self.h(), a)


ALL_CASES = (HCase.GENERIC, HCase.CONST, HCase.LINEAR, HCase.QUADRATIC,
             HCase.POWER, HCase.EXP, HCase.LOG)


def case_from_tag(tag: str, **params) -> HCase:
    builders = {
        HCase.GENERIC: HCase.generic,
        HCase.CONST: HCase.const,
        HCase.LINEAR: HCase.linear,
        HCase.QUADRATIC: HCase.quadratic,
        HCase.POWER: HCase.power,
        HCase.EXP: HCase.exponential,
        HCase.LOG: HCase.log,
    }
    if tag not in builders:
        raise InvalidCaseParameter(f"unknown case {tag!r}")
    return builders[tag](**params)


@dataclass(eq=False)
class SystemE:
    """Momentum, continuity and heat equations on the curve, plus the solved
    forms of the principal derivatives u_t, rho_t, s_t."""

    case: HCase
    equations: tuple[Expr, Expr, Expr]
    principal: dict[sp.Symbol, Expr]
    _solved_cache: dict = field(default_factory=dict, repr=False)

    def reduce(self, e: Expr) -> Expr:
        """Normal form modulo the prolonged system: substitute every principal
        jet (t-derivatives of u, rho, s) by its consequence of the solved forms."""
        e = sp.sympify(e)
        while True:
            subs = {}
            for w in jet_vars_in(e):
                if w.field in PRINCIPAL_FIELDS and w.i >= 1:
                    subs[w.symbol] = self._solved(w)
            if not subs:
                return e
            e = e.subs(subs, simultaneous=True)

    def _solved(self, w: JetVar) -> Expr:
        key = (w.field, w.i, w.j)
        if key in self._solved_cache:
            return self._solved_cache[key]
        if (w.i, w.j) == (1, 0):
            out = self.principal[w.symbol]
        elif w.i == 1:
            # D_a preserves reduced form (never creates t-derivatives)
            out = total_derivative(self._solved(JetVar(w.field, 1, w.j - 1)), a)
        else:
            out = self.reduce(total_derivative(self._solved(JetVar(w.field, w.i - 1, w.j)), t))
        out = sp.expand(out)
        self._solved_cache[key] = out
        return out


def build_system(case: HCase, g_sym: Expr = g, k_sym: Expr = k_cond) -> SystemE:
    """Equations of motion on the curve with gravity along -h'(a)."""
    hp = case.h_prime()
    u_t, u_a = jet("u", 1, 0), jet("u", 0, 1)
    rho_t, rho_a = jet("rho", 1, 0), jet("rho", 0, 1)
    s_t, s_a = jet("s", 1, 0), jet("s", 0, 1)
    p_a = jet("p", 0, 1)
    T_aa = jet("T", 0, 2)
    E1 = rho * (u_t + u * u_a) + p_a + g_sym * hp * rho
    E2 = rho_t + total_derivative(rho * u, a)
    E3 = T * (s_t + u * s_a) - (k_sym / rho) * T_aa
    principal = {
        u_t: -(p_a + g_sym * hp * rho) / rho - u * u_a,
        rho_t: -rho_a * u - rho * u_a,
        s_t: k_sym * T_aa / (rho * T) - u * s_a,
    }
    return SystemE(case, (E1, E2, E3), principal)


def reduce(sys: SystemE, e: Expr) -> Expr:
    return sys.reduce(e)


@dataclass
class SymmetryReport:
    field_name: str
    residuals: tuple[Expr, Expr, Expr]
    statuses: tuple[str, str, str]  # "zero" | "nonzero" | "undecided"

    @property
    def passed(self) -> bool:
        return all(st == "zero" for st in self.statuses)

    @property
    def undecided(self) -> bool:
        return any(st == "undecided" for st in self.statuses)


def is_symmetry(X: PointField, sys: SystemE) -> SymmetryReport:
    """Pass iff the 2nd prolongation of X annihilates all three equations
    modulo the system."""
    Xk = prolong(X, 2)
    residuals = []
    statuses = []
    for eq in sys.equations:
        r = sp.expand(Xk.apply(eq))
        if r != 0:
            r = sp.expand(sys.reduce(r))
        residuals.append(r)
        try:
            statuses.append("zero" if symcore.is_zero(r) else "nonzero")
        except symcore.UndecidedZeroTest:
            statuses.append("undecided")
    return SymmetryReport(X.name, tuple(residuals), tuple(statuses))


# --- generator tables -------------------------------------------------------

def _pf(name: str, **coeffs) -> PointField:
    return PointField(coeffs, name=name)


def common_generators() -> list[PointField]:
    """X_1..X_5, shared by every case."""
    return [
        _pf("X1", t=1),
        _pf("X2", p=1),
        _pf("X3", s=1),
        _pf("X4", T=T),
        _pf("X5", p=p, rho=rho, s=-s),
    ]


def linear_x9_variants(lam_val=lam, g_sym: Expr = g) -> dict[str, PointField]:
    """Both printed variants of the linear-case X_9; `is_symmetry` arbitrates.

    The section table carries u-coefficient (t + u/(lambda*g)), the appendix
    2*(t + u/(lambda*g)).  Only one can be a symmetry.
    """
    lg = lam_val * g_sym
    xi_a = t ** 2 / 2 + a / lg
    base = dict(a=xi_a, rho=-2 * rho / lg)
    return {
        "section": _pf("X9", u=t + u / lg, **base),
        "appendix": _pf("X9_appendix", u=2 * (t + u / lg), **base),
    }


def generators(case: HCase, g_sym: Expr = g, lambda_positive: Optional[bool] = None
               ) -> list[PointField]:
    """The case's full generator list, exactly as classified."""
    gens = common_generators()
    if case.tag == HCase.GENERIC:
        return gens
    if case.tag == HCase.CONST:
        gens += [
            _pf("X6", a=1),
            _pf("X7", a=t, u=1),
            _pf("X8", t=t, a=a, s=-s),
            _pf("X9", t=t, u=-u, p=-2 * p, s=s),
        ]
        return gens
    if case.tag == HCase.LINEAR:
        lam_val = case.params[0]
        gens += [
            _pf("X6", a=1),
            _pf("X7", a=t, u=1),
            _pf("X8", t=t, a=2 * a, u=u, rho=-2 * rho, s=-s),
            linear_x9_variants(lam_val, g_sym)["section"],
        ]
        return gens
    if case.tag == HCase.QUADRATIC:
        lam_val = case.params[0]
        if lambda_positive is None:
            lambda_positive = lam_val.is_negative is not True
        gens.append(_pf("X6", a=a, u=u, rho=-2 * rho))
        if lambda_positive:
            w = sp.sqrt(2 * lam_val * g_sym)
            gens += [
                _pf("X7", a=sp.sin(w * t), u=w * sp.cos(w * t)),
                _pf("X8", a=sp.cos(w * t), u=-w * sp.sin(w * t)),
            ]
        else:
            w = sp.sqrt(-2 * lam_val * g_sym)
            gens += [
                _pf("X7", a=sp.exp(w * t), u=w * sp.exp(w * t)),
                _pf("X8", a=sp.exp(-w * t), u=-w * sp.exp(-w * t)),
            ]
        return gens
    if case.tag == HCase.POWER:
        m = case.params[1]
        gens.append(_pf("X6", t=t, a=-2 * a / (m - 2), u=-m * u / (m - 2),
                        rho=2 * m * rho / (m - 2), s=-s))
        return gens
    if case.tag == HCase.EXP:
        m = case.params[1]
        gens.append(_pf("X6", t=t, a=-2 / m, u=-u, p=-p, rho=rho))
        return gens
    if case.tag == HCase.LOG:
        gens.append(_pf("X6", t=t, a=a, s=-s))
        return gens
    raise InvalidCaseParameter(case.tag)


def shifted_system(case: HCase, a0_val: Expr, h0_val: Expr,
                   g_sym: Expr = g) -> SystemE:
    """System for h(a + a0) + h0; used for the shift-invariance property."""
    h_shift = case.h().subs(a, a + a0_val) + h0_val
    return build_system(HCase.generic(h_shift), g_sym=g_sym)

"""Kinematic and Euler differential invariants of the curve Euler system:
invariance verification, invariant derivations, independence counting, and
the per-case displayed bases."""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field

import sympy as sp

from . import symcore
from .eulersys import HCase, SystemE, build_system, generators
from .jetspace import JetVar, PointField, jet_vars_in, max_order, prolong, total_derivative
from .liealg import AlgebraBasis, _rank, kernel_theta
from .symcore import Expr, a, rho, s, sym, t, u

xi1, xi2, xi3, xi4, xi5, xi6 = (sym(f"xi{i}") for i in range(1, 7))
lam = sym("lambda")
lam2 = sym("lambda2")
g = sym("g")

u_a = symcore.jet("u", 0, 1)
rho_a = symcore.jet("rho", 0, 1)
s_t = symcore.jet("s", 1, 0)
s_a = symcore.jet("s", 0, 1)


class DegenerateCoefficients(ValueError):
    """The chosen xi make a displayed denominator or the whole field vanish."""


def _jet_rational(e: Expr) -> bool:
    """Rational along the jet fibers: every jet variable of order >= 1 appears
    only through integer powers."""
    e = sp.sympify(e)
    jets = {w.symbol for w in jet_vars_in(e) if w.order >= 1}
    if not jets:
        return True
    for pw in e.atoms(sp.Pow):
        if pw.base.free_symbols & jets and not pw.exp.is_Integer:
            return False
    if any(fn.free_symbols & jets for fn in e.atoms(sp.Function)):
        return False
    return True


@dataclass(frozen=True)
class InvariantCandidate:
    """Function on a jet prolongation proposed as a differential invariant."""

    expr: Expr
    order: int
    name: str = ""

    def __post_init__(self):
        e = sp.sympify(self.expr)
        object.__setattr__(self, "expr", e)
        if not _jet_rational(e):
            raise ValueError(f"{self.name or e}: not rational in the jet variables")
        if max_order(e) > self.order:
            raise ValueError(f"{self.name or e}: jet order exceeds declared order {self.order}")


@dataclass(frozen=True)
class DerivationCandidate:
    """Total derivation A*D_t + B*D_a."""

    A: Expr
    B: Expr
    name: str = ""

    def __call__(self, e: Expr) -> Expr:
        return (sp.sympify(self.A) * total_derivative(e, t)
                + sp.sympify(self.B) * total_derivative(e, a))


@dataclass(frozen=True)
class InvariantBasis:
    """Displayed first-order basis with its invariant derivations."""

    invariants: tuple[InvariantCandidate, ...]
    derivations: tuple[DerivationCandidate, ...]


# --- invariance tests --------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _system(case: HCase) -> SystemE:
    return build_system(case)


@functools.lru_cache(maxsize=None)
def kinematic_algebra(case: HCase) -> tuple[PointField, ...]:
    """Basis of the geometric part ker(theta) acting on kinematic invariants."""
    return tuple(kernel_theta(AlgebraBasis(generators(case), label=case.tag)))


def _residual_is_zero(r: Expr) -> bool:
    """Zero test for an invariance residual (exact on the rational fragment,
    identity rewriting plus sampling elsewhere)."""
    r = sp.expand(r)
    if r == 0:
        return True
    return symcore.is_zero(r)


def invariance_residuals(J: InvariantCandidate, fields, case: HCase):
    """Reduced residual of X^(k)(J) for each field, with its status."""
    sys = _system(case)
    out = []
    for X in fields:
        k = max(J.order, max_order(J.expr))
        r = prolong(X, k).apply(J.expr)
        r = sys.reduce(sp.expand(r))
        try:
            status = "zero" if _residual_is_zero(r) else "nonzero"
        except symcore.UndecidedZeroTest:
            status = "undecided"
        out.append((X.name, r, status))
    return out


def is_kinematic_invariant(J: InvariantCandidate, case: HCase) -> bool:
    """Invariance under the prolonged geometric part ker(theta)."""
    return all(st == "zero" for _, _, st in
               invariance_residuals(J, kinematic_algebra(case), case))


def _thermo_field_names(case: HCase) -> tuple[str, ...]:
    """Generator names carrying the xi coefficients of the admissible
    thermodynamic symmetry, in display order."""
    if case.tag == HCase.GENERIC:
        return ("X2", "X3", "X4", "X5")
    if case.tag in (HCase.CONST, HCase.LINEAR):
        return ("X2", "X3", "X4", "X5", "X8", "X9")
    return ("X2", "X3", "X4", "X5", "X6")


def default_xi(case: HCase) -> tuple[sp.Symbol, ...]:
    return (xi1, xi2, xi3, xi4, xi5, xi6)[:len(_thermo_field_names(case))]


def thermo_symmetry_field(case: HCase, xi=None) -> PointField:
    """A = sum xi_i X_i over the case's thermodynamic generators."""
    xi = tuple(sp.sympify(x) for x in (xi if xi is not None else default_xi(case)))
    names = _thermo_field_names(case)
    if len(xi) != len(names):
        raise ValueError(f"expected {len(names)} coefficients for {case.tag}, got {len(xi)}")
    if all(x.is_zero for x in xi):
        raise DegenerateCoefficients("all xi coefficients vanish")
    by_name = {X.name: X for X in generators(case)}
    A = PointField({})
    for c, n in zip(xi, names):
        A = A + c * by_name[n]
    A.name = "A"
    return A


def euler_algebra(case: HCase, xi=None) -> AlgebraBasis:
    """ker(theta) extended by the admissible thermodynamic field A."""
    fields = list(kinematic_algebra(case)) + [thermo_symmetry_field(case, xi)]
    return AlgebraBasis(fields, label=f"euler({case.tag})")


def is_euler_invariant(J: InvariantCandidate, case: HCase, xi=None) -> bool:
    return all(st == "zero" for _, _, st in
               invariance_residuals(J, euler_algebra(case, xi).fields, case))


def derivation_is_invariant(nabla: DerivationCandidate, case: HCase,
                            selector: str = "kinematic", xi=None,
                            basis=None) -> bool:
    """Operational invariance: nabla maps every basis invariant to an
    invariant of the same algebra (modulo the system)."""
    if selector == "kinematic":
        fields = kinematic_algebra(case)
        basis = basis if basis is not None else kinematic_basis(case).invariants
    elif selector == "euler":
        fields = euler_algebra(case, xi).fields
        basis = basis if basis is not None else euler_basis(case, xi).invariants
    else:
        raise ValueError(f"unknown algebra selector {selector!r}")
    if not basis:
        raise ValueError("basis must be nonempty")
    sys = _system(case)
    for J in basis:
        image = sys.reduce(sp.expand(nabla(J.expr)))
        candidate = InvariantCandidate.__new__(InvariantCandidate)
        object.__setattr__(candidate, "expr", image)
        object.__setattr__(candidate, "order", max_order(image))
        object.__setattr__(candidate, "name", f"{nabla.name}({J.name})")
        if not all(st == "zero" for _, _, st in
                   invariance_residuals(candidate, fields, case)):
            return False
    return True


# --- independence counting ---------------------------------------------------

_POINT_PRIMES = (5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)


def _sample_point(rng: random.Random, symbols) -> dict:
    fixed = {sym("rho"): sp.Integer(2), sym("T"): sp.Integer(3)}
    out = {}
    for sm in symbols:
        if sm in fixed:
            out[sm] = fixed[sm]
        else:
            out[sm] = sp.Rational(rng.choice(_POINT_PRIMES), rng.choice((1, 2, 3)))
    return out


def independent_count(basis, k: int, case: HCase, seed: int = 0) -> int:
    """Number of functionally independent pure-order-k members: the rank of
    their Jacobian with respect to the order-k jet coordinates on the reduced
    system, at a random regular rational point."""
    sys = _system(case)
    members = [J for J in basis if max_order(J.expr) == k]
    if not members:
        return 0
    # restrict to the system: substitute the principal jets whose solved form
    # stays within order k
    subs = {}
    exprs = [sp.sympify(J.expr) for J in members]
    for e in exprs:
        for w in jet_vars_in(e):
            if w.field in ("u", "rho", "s") and w.i >= 1:
                solved = sys._solved(w)
                if max_order(solved) <= k:
                    subs[w.symbol] = solved
    exprs = [e.subs(subs, simultaneous=True) for e in exprs]
    jet_syms = sorted({w.symbol for e in exprs for w in jet_vars_in(e)
                       if w.order == k}, key=lambda x: x.name)
    jac = sp.Matrix([[sp.diff(e, w) for w in jet_syms] for e in exprs])
    coords = sorted({sm for e in exprs for sm in e.free_symbols
                     if symcore.TABLE.kind(sm) in ("base", "fiber", "jet")},
                    key=lambda x: x.name)
    rng = random.Random(seed)
    for _ in range(10):
        point = _sample_point(rng, coords)
        try:
            num = jac.subs(point)
            return _rank(num)
        except (ZeroDivisionError, ValueError):
            continue
    raise RuntimeError("no regular sample point found for the rank computation")


# --- displayed bases ---------------------------------------------------------

def _inv(e: Expr, name: str) -> InvariantCandidate:
    e = sp.sympify(e)
    return InvariantCandidate(e, max_order(e), name)


def _check_nondegenerate(values: dict):
    for label, v in values.items():
        if sp.cancel(sp.sympify(v)).is_zero:
            raise DegenerateCoefficients(f"degenerate coefficient combination: {label} = 0")


def kinematic_basis(case: HCase) -> InvariantBasis:
    """First-order generators of the kinematic invariant field."""
    if case.tag in (HCase.CONST, HCase.LINEAR, HCase.QUADRATIC):
        invs = (_inv(rho, "rho"), _inv(s, "s"), _inv(u_a, "u_a"),
                _inv(rho_a, "rho_a"), _inv(s_a, "s_a"),
                _inv(s_t + u * s_a, "s_t+u*s_a"))
        ders = (DerivationCandidate(1, u, "D_t+u*D_a"),
                DerivationCandidate(0, 1, "D_a"))
    else:
        invs = (_inv(a, "a"), _inv(u, "u"), _inv(rho, "rho"), _inv(s, "s"),
                _inv(u_a, "u_a"), _inv(rho_a, "rho_a"),
                _inv(s_t, "s_t"), _inv(s_a, "s_a"))
        ders = (DerivationCandidate(1, 0, "D_t"),
                DerivationCandidate(0, 1, "D_a"))
    return InvariantBasis(invs, ders)


def euler_basis(case: HCase, xi=None) -> InvariantBasis:
    """Displayed first-order generators of the Euler invariant field for a
    thermodynamic state with a one-dimensional symmetry algebra."""
    xi = tuple(sp.sympify(x) for x in (xi if xi is not None else default_xi(case)))
    if len(xi) != len(_thermo_field_names(case)):
        raise ValueError(f"expected {len(_thermo_field_names(case))} coefficients "
                         f"for {case.tag}")
    if case.tag == HCase.GENERIC:
        x1, x2, x3, x4 = xi
        _check_nondegenerate({"xi4": x4})
        invs = ((a, "a"), ((s - x2 / x4) * rho, "(s-xi2/xi4)*rho"), (u, "u"),
                (u_a, "u_a"), (rho_a / rho, "rho_a/rho"),
                (s_t * rho, "s_t*rho"), (s_a * rho, "s_a*rho"))
        ders = ((1, 0, "D_t"), (0, 1, "D_a"))
    elif case.tag == HCase.CONST:
        x1, x2, x3, x4, x5, x6 = xi
        _check_nondegenerate({"xi4": x4, "xi4+xi5-xi6": x4 + x5 - x6})
        invs = (((s - x2 / (x4 + x5 - x6)) * rho_a / (rho * s_a),
                 "(s-xi2/(xi4+xi5-xi6))*rho_a/(rho*s_a)"),
                (u_a * rho ** (x6 / x4 + 1) / rho_a, "u_a*rho^(xi6/xi4+1)/rho_a"),
                (rho_a * rho ** (x5 / x4 - 1), "rho_a*rho^(xi5/xi4-1)"),
                (u_a * s_a * rho ** 4 / rho_a ** 3, "u_a*s_a*rho^4/rho_a^3"),
                ((s_t + u * s_a) * rho ** 3 / rho_a ** 2,
                 "(s_t+u*s_a)*rho^3/rho_a^2"))
        ders = ((rho ** ((x5 + x6) / x4), u * rho ** ((x5 + x6) / x4),
                 "rho^((xi5+xi6)/xi4)*(D_t+u*D_a)"),
                (0, rho ** (x5 / x4), "rho^(xi5/xi4)*D_a"))
    elif case.tag == HCase.LINEAR:
        x1, x2, x3, x4, x5, x6 = xi
        lam_val = case.params[0]
        lg = lam_val * g
        den = lg * (x4 - 2 * x5) - 2 * x6
        _check_nondegenerate({"xi4+xi5": x4 + x5,
                              "lambda*g*(xi4-2*xi5)-2*xi6": den})
        invs = (((s - x2 / (x4 + x5)) * rho_a / (rho * s_a),
                 "(s-xi2/(xi4+xi5))*rho_a/(rho*s_a)"),
                (u_a * rho ** (lg * x5 / den),
                 "u_a*rho^(lambda*g*xi5/(lambda*g*(xi4-2*xi5)-2*xi6))"),
                (rho_a * u_a ** -2 * rho ** (x6 / den - 1),
                 "rho_a*u_a^-2*rho^(xi6/(lambda*g*(xi4-2*xi5)-2*xi6)-1)"),
                (u_a * s_a * rho ** 4 / rho_a ** 3, "u_a*s_a*rho^4/rho_a^3"),
                ((s_t + u * s_a) * rho ** 3 / rho_a ** 2,
                 "(s_t+u*s_a)*rho^3/rho_a^2"))
        ders = ((rho ** (lg * x5 / den), u * rho ** (lg * x5 / den),
                 "rho^(lambda*g*xi5/den)*(D_t+u*D_a)"),
                (0, rho ** ((2 * lg * x5 + x6) / den),
                 "rho^((2*lambda*g*xi5+xi6)/den)*D_a"))
    elif case.tag == HCase.QUADRATIC:
        x1, x2, x3, x4, x5 = xi
        _check_nondegenerate({"xi4": x4, "xi4-2*xi5": x4 - 2 * x5})
        invs = (((s - x2 / x4) * rho_a / (rho * s_a),
                 "(s-xi2/xi4)*rho_a/(rho*s_a)"),
                (u_a, "u_a"),
                (rho_a * rho ** (x5 / (x4 - 2 * x5) - 1),
                 "rho_a*rho^(xi5/(xi4-2*xi5)-1)"),
                (s_a * rho ** 4 / rho_a ** 3, "s_a*rho^4/rho_a^3"),
                ((s_t + u * s_a) * rho ** 3 / rho_a ** 2,
                 "(s_t+u*s_a)*rho^3/rho_a^2"))
        ders = ((1, u, "D_t+u*D_a"),
                (0, rho ** (x5 / (x4 - 2 * x5)), "rho^(xi5/(xi4-2*xi5))*D_a"))
    elif case.tag == HCase.POWER:
        x1, x2, x3, x4, x5 = xi
        _check_nondegenerate({"xi5": x5, "xi4+xi5": x4 + x5})
        invs = ((rho * u ** 2 * a ** (x4 * (x2 - 2) / (2 * x5)),
                 "rho*u^2*a^(xi4*(xi2-2)/(2*xi5))"),
                ((s - x2 / (x4 + x5)) * a * u * rho,
                 "(s-xi2/(xi4+xi5))*a*u*rho"),
                (u * a ** (-x2 / 2), "u*a^(-xi2/2)"),
                (u_a * a / u, "u_a*a/u"),
                (rho_a * a / rho, "rho_a*a/rho"),
                (s_t * a ** 2 * rho, "s_t*a^2*rho"),
                (s_a * a ** 2 * u * rho, "s_a*a^2*u*rho"))
        ders = ((a ** (1 - x2 / 2), 0, "a^(1-xi2/2)*D_t"),
                (0, a, "a*D_a"))
    elif case.tag == HCase.EXP:
        x1, x2, x3, x4, x5 = xi
        _check_nondegenerate({"xi4": x4, "xi5": x5})
        invs = ((rho * u * sp.exp(x2 * x4 * a / (2 * x5)),
                 "rho*u*exp(xi2*xi4*a/(2*xi5))"),
                ((s - x2 / x4) * u * rho, "(s-xi2/xi4)*u*rho"),
                (u * sp.exp(-x2 * a / 2), "u*exp(-xi2*a/2)"),
                (u_a / u, "u_a/u"),
                (rho_a / rho, "rho_a/rho"),
                (s_t * rho, "s_t*rho"),
                (s_a * u * rho, "s_a*u*rho"))
        ders = ((sp.exp(-x2 * a / 2), 0, "exp(-xi2*a/2)*D_t"),
                (0, 1, "D_a"))
    elif case.tag == HCase.LOG:
        x1, x2, x3, x4, x5 = xi
        _check_nondegenerate({"xi5": x5, "xi4+xi5": x4 + x5})
        invs = ((rho * a ** (-x4 / x5), "rho*a^(-xi4/xi5)"),
                ((s - x2 / (x4 + x5)) * a * rho, "(s-xi2/(xi4+xi5))*a*rho"),
                (u, "u"),
                (u_a * a, "u_a*a"),
                (rho_a * a / rho, "rho_a*a/rho"),
                (s_t * a ** 2 * rho, "s_t*a^2*rho"),
                (s_a * a ** 2 * rho, "s_a*a^2*rho"))
        ders = ((a, 0, "a*D_t"), (0, a, "a*D_a"))
    else:
        raise ValueError(case.tag)
    return InvariantBasis(tuple(_inv(e, n) for e, n in invs),
                          tuple(DerivationCandidate(A, B, n) for A, B, n in ders))


def euler_report(case: HCase, xi=None) -> dict:
    """Per-invariant and per-derivation status of the displayed Euler basis;
    entries that fail with symbolic coefficients are flagged, not dropped."""
    basis = euler_basis(case, xi)
    fields = euler_algebra(case, xi).fields
    invariants = {}
    for J in basis.invariants:
        statuses = {n: st for n, _, st in invariance_residuals(J, fields, case)}
        if all(st == "zero" for st in statuses.values()):
            verdict = "pass"
        elif any(st == "undecided" for st in statuses.values()):
            verdict = "undecided"
        else:
            verdict = "fail"
        invariants[J.name] = {"status": verdict, "per_generator": statuses}
    derivations = {}
    for nabla in basis.derivations:
        try:
            ok = derivation_is_invariant(nabla, case, "euler", xi=xi,
                                         basis=[J for J in basis.invariants
                                                if invariants[J.name]["status"] == "pass"])
            derivations[nabla.name] = {"status": "pass" if ok else "fail"}
        except symcore.UndecidedZeroTest:
            derivations[nabla.name] = {"status": "undecided"}
    return {"case": case.tag, "invariants": invariants, "derivations": derivations}

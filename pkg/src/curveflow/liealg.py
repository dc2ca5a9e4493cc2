"""Lie-algebra structure of the symmetry generators: brackets, derived
series, solvability, the thermodynamic projection and its kernel."""

from __future__ import annotations

from dataclasses import dataclass

import sympy as sp

from . import symcore
from .eulersys import HCase, generators
from .jetspace import COORD_NAMES, COORD_SYMS, PointField
from .symcore import Expr, p, rho, s, sym

T = sym("T")
THERMO_NAMES = ("p", "rho", "s", "T")
THERMO_SYMS = tuple(sym(n) for n in THERMO_NAMES)


class NotClosed(ValueError):
    """A bracket left the span of the proposed basis."""


class NotProjectable(ValueError):
    """Thermodynamic coefficients depend on t, a or u."""


class NotSolvable(RuntimeError):
    """Derived series stabilized above zero."""


def _cancel0(e: Expr) -> Expr:
    return sp.cancel(sp.together(sp.expand(e)))


@dataclass(eq=False)
class ThermoField:
    """Vector field on the thermodynamic variables (p, rho, s, T)."""

    coeffs: dict[str, Expr]
    name: str = ""

    def __post_init__(self):
        self.coeffs = {n: sp.sympify(self.coeffs.get(n, 0)) for n in THERMO_NAMES}

    def __call__(self, e: Expr) -> Expr:
        e = sp.sympify(e)
        return sum((c * sp.diff(e, sym(n)) for n, c in self.coeffs.items()),
                   sp.Integer(0))

    def is_zero(self) -> bool:
        return all(symcore.is_zero(c) for c in self.coeffs.values())

    def __repr__(self):
        parts = [f"({sp.sstr(c)})*d_{n}" for n, c in self.coeffs.items() if c != 0]
        label = f"{self.name}: " if self.name else ""
        return f"<ThermoField {label}{' + '.join(parts) or '0'}>"


def bracket(X: PointField, Y: PointField) -> PointField:
    """[X, Y] computed coefficient-wise."""
    return PointField(
        {n: _cancel0(X(Y.coeffs[n]) - Y(X.coeffs[n])) for n in COORD_NAMES},
        name=f"[{X.name},{Y.name}]" if X.name and Y.name else "",
    )


def thermo_bracket(X: ThermoField, Y: ThermoField) -> ThermoField:
    return ThermoField(
        {n: _cancel0(X(Y.coeffs[n]) - Y(X.coeffs[n])) for n in THERMO_NAMES})


# --- linear algebra over a fixed monomial/function basis --------------------

def _decompose(coeff: Expr, active_syms) -> dict:
    """Split an expanded coefficient into {monomial-key: scalar} where scalars
    are rational functions of the parameters only."""
    out: dict = {}
    for term in sp.Add.make_args(sp.expand(coeff)):
        indep, dep = term.as_independent(*active_syms)
        out[dep] = out.get(dep, 0) + indep
    return {key: val for key, val in out.items() if _cancel0(val) != 0}


def _coefficient_matrix(fields, coord_names, active_syms):
    """Rows are fields, columns the union of (coordinate, monomial) pairs."""
    rows = [
        {(n, key): val
         for n in coord_names
         for key, val in _decompose(X.coeffs[n], active_syms).items()}
        for X in fields
    ]
    columns = sorted({c for row in rows for c in row},
                     key=lambda c: (c[0], sp.default_sort_key(c[1])))
    mat = sp.Matrix([[_cancel0(row.get(c, 0)) for c in columns] for row in rows])
    return mat, columns


def _matrix_for(fields):
    if not fields:
        return sp.Matrix(0, 0, []), []
    if isinstance(fields[0], ThermoField):
        return _coefficient_matrix(fields, THERMO_NAMES, THERMO_SYMS)
    return _coefficient_matrix(fields, COORD_NAMES, COORD_SYMS)


def _rank(mat: sp.Matrix) -> int:
    if mat.rows == 0 or mat.cols == 0:
        return 0
    return mat.rank(iszerofunc=lambda e: _cancel0(e) == 0, simplify=_cancel0)


def span_rank(fields) -> int:
    mat, _ = _matrix_for(fields)
    return _rank(mat)


def span_contains(fields, Y) -> bool:
    if not fields:
        return Y.is_zero()
    return span_rank(list(fields) + [Y]) == span_rank(list(fields))


def span_equal(fields_a, fields_b) -> bool:
    ra = span_rank(list(fields_a))
    rb = span_rank(list(fields_b))
    return ra == rb == span_rank(list(fields_a) + list(fields_b))


@dataclass(eq=False)
class AlgebraBasis:
    """Linearly independent list of point fields spanning a Lie algebra."""

    fields: list[PointField]
    label: str = ""

    def __post_init__(self):
        n = len(self.fields)
        if n and span_rank(self.fields) != n:
            raise ValueError(f"basis of {self.label or 'algebra'} is linearly dependent")

    @property
    def dim(self) -> int:
        return len(self.fields)

    def contains(self, Y: PointField) -> bool:
        return span_contains(self.fields, Y)

    def verify_closed(self):
        for i, X in enumerate(self.fields):
            for Y in self.fields[i + 1:]:
                b = bracket(X, Y)
                if not self.contains(b):
                    raise NotClosed(f"[{X.name},{Y.name}] is outside span({self.label})")

    def __repr__(self):
        names = ", ".join(X.name or "?" for X in self.fields)
        return f"<AlgebraBasis {self.label or ''} dim={self.dim}: {names}>"


def algebra(case: HCase, label: str = "", **kw) -> AlgebraBasis:
    return AlgebraBasis(generators(case, **kw), label=label or f"g({case.tag})")


def _independent_subset(fields) -> list:
    basis: list = []
    r = 0
    for X in fields:
        if X.is_zero():
            continue
        candidate = basis + [X]
        rr = span_rank(candidate)
        if rr > r:
            basis = candidate
            r = rr
    return basis


def derived_algebra(fields) -> list:
    brackets = []
    for i, X in enumerate(fields):
        for Y in fields[i + 1:]:
            brackets.append(bracket(X, Y))
    return _independent_subset(brackets)


def derived_series(A: AlgebraBasis, max_steps: int = 12) -> list[AlgebraBasis]:
    """[A, A', A'', ...] down to the zero algebra; raises NotClosed when A
    itself is not a Lie algebra, NotSolvable when the chain stalls."""
    A.verify_closed()
    series = [A]
    current = A.fields
    for step in range(1, max_steps + 1):
        nxt = derived_algebra(current)
        series.append(AlgebraBasis(nxt, label=f"{A.label}^({step})"))
        if not nxt:
            return series
        if len(nxt) == len(current):
            raise NotSolvable(f"derived series of {A.label} stabilized at dim {len(nxt)}")
        current = nxt
    raise NotSolvable(f"derived series of {A.label} did not terminate in {max_steps} steps")


def is_solvable(A: AlgebraBasis) -> bool:
    try:
        return derived_series(A)[-1].dim == 0
    except NotSolvable:
        return False


# --- thermodynamic projection -----------------------------------------------

def theta(X: PointField) -> ThermoField:
    """Project onto the thermodynamic variables; the coefficients must not
    involve t, a or u."""
    forbidden = set(COORD_SYMS) - set(THERMO_SYMS)
    coeffs = {}
    for n in THERMO_NAMES:
        c = X.coeffs[n]
        if c.free_symbols & forbidden:
            raise NotProjectable(
                f"{X.name or 'field'}: coefficient of d_{n} depends on kinematic variables")
        coeffs[n] = c
    return ThermoField(coeffs, name=f"theta({X.name})" if X.name else "")


def kernel_theta(A: AlgebraBasis | list) -> list[PointField]:
    """Basis of the geometric symmetries {X in span(A) : theta(X) = 0}."""
    fields = A.fields if isinstance(A, AlgebraBasis) else list(A)
    if not fields:
        return []
    images = [theta(X) for X in fields]
    mat, _ = _matrix_for(images)
    null = mat.T.nullspace(iszerofunc=lambda e: _cancel0(e) == 0, simplify=_cancel0)
    out = []
    for vec in null:
        combo = PointField({n: 0 for n in COORD_NAMES})
        names = []
        for c, X in zip(vec, fields):
            if _cancel0(c) != 0:
                combo = combo + (sp.nsimplify(c) * X if not isinstance(c, sp.Expr) else c * X)
                names.append(f"{sp.sstr(_cancel0(c))}*{X.name}")
        combo = combo.simplified()
        combo.name = " + ".join(names)
        out.append(combo)
    return out


def thermo_part(case: HCase) -> list[ThermoField]:
    """The listed Y-basis of the pure thermodynamic part for the case."""

    def tf(name, **coeffs):
        return ThermoField(coeffs, name=name)

    base = [tf("Y1", p=1), tf("Y2", s=1), tf("Y3", T=T)]
    if case.tag == HCase.GENERIC:
        return base + [tf("Y4", p=p, rho=rho, s=-s)]
    if case.tag in (HCase.CONST, HCase.LINEAR):
        return base + [tf("Y4", p=p), tf("Y5", rho=rho), tf("Y6", s=s)]
    if case.tag == HCase.QUADRATIC:
        return base + [tf("Y4", rho=rho), tf("Y5", p=p, s=-s)]
    if case.tag == HCase.POWER:
        m = case.params[1]
        return base + [tf("Y4", rho=2 * m * rho, s=-(m - 2) * s),
                       tf("Y5", p=p, rho=rho, s=-s)]
    if case.tag == HCase.EXP:
        return base + [tf("Y4", p=p, rho=-rho), tf("Y5", rho=2 * rho, s=-s)]
    if case.tag == HCase.LOG:
        return base + [tf("Y4", s=s), tf("Y5", p=p, rho=rho)]
    raise ValueError(case.tag)

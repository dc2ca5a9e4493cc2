"""Jet coordinates, total derivatives and prolongation of point fields."""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy as sp

from . import symcore
from .symcore import TABLE, Expr, FIBER_NAMES, a, t

COORD_NAMES = ("t", "a", "u", "p", "rho", "s", "T")
COORD_SYMS = tuple(symcore.sym(n) for n in COORD_NAMES)


@dataclass(frozen=True)
class JetVar:
    """Jet coordinate: `field` differentiated i times by t and j times by a."""

    field: str
    i: int
    j: int

    def __post_init__(self):
        if self.field not in FIBER_NAMES:
            raise ValueError(f"not a fiber variable: {self.field!r}")

    @property
    def order(self) -> int:
        return self.i + self.j

    @property
    def symbol(self) -> sp.Symbol:
        return TABLE.jet(self.field, self.i, self.j)

    def raised(self, x: sp.Symbol) -> "JetVar":
        if x == t:
            return JetVar(self.field, self.i + 1, self.j)
        if x == a:
            return JetVar(self.field, self.i, self.j + 1)
        raise ValueError(f"not a base variable: {x}")


def jet_vars_in(e: Expr):
    """JetVars (order >= 0, i.e. fiber variables included) appearing in e."""
    out = []
    for sm in sp.sympify(e).free_symbols:
        idx = TABLE.jet_index(sm)
        if idx is not None:
            out.append(JetVar(*idx))
    return sorted(out, key=lambda w: (w.field, w.i, w.j))


def max_order(e: Expr) -> int:
    orders = [w.order for w in jet_vars_in(e)]
    return max(orders, default=0)


def total_derivative(e: Expr, x: sp.Symbol) -> Expr:
    """D_x e = de/dx + sum over jets of (de/dw_J) w_{J,x}."""
    if x not in (t, a):
        raise ValueError(f"total derivative only along base variables, got {x}")
    e = sp.sympify(e)
    out = sp.diff(e, x)
    for w in jet_vars_in(e):
        out += sp.diff(e, w.symbol) * w.raised(x).symbol
    return out


@dataclass(eq=False)
class PointField:
    """Vector field on the 0-jet coordinates (t, a, u, p, rho, s, T)."""

    coeffs: dict[str, Expr]
    name: str = ""
    _prolongations: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        full = {n: sp.sympify(self.coeffs.get(n, 0)) for n in COORD_NAMES}
        for n, c in full.items():
            if max_order(c) > 0:
                raise ValueError(f"coefficient of d_{n} contains jet variables: {c}")
        self.coeffs = full

    def __call__(self, e: Expr) -> Expr:
        """Directional derivative of a 0-jet function."""
        e = sp.sympify(e)
        return sum((c * sp.diff(e, symcore.sym(n)) for n, c in self.coeffs.items()),
                   sp.Integer(0))

    def is_zero(self) -> bool:
        return all(symcore.is_zero(c) for c in self.coeffs.values())

    def __add__(self, other: "PointField") -> "PointField":
        return PointField({n: self.coeffs[n] + other.coeffs[n] for n in COORD_NAMES})

    def __rmul__(self, scalar) -> "PointField":
        return PointField({n: sp.sympify(scalar) * c for n, c in self.coeffs.items()})

    def simplified(self) -> "PointField":
        return PointField({n: sp.cancel(sp.together(c)) for n, c in self.coeffs.items()},
                          name=self.name)

    def __repr__(self):
        parts = [f"({sp.sstr(c)})*d_{n}" for n, c in self.coeffs.items() if c != 0]
        label = f"{self.name}: " if self.name else ""
        return f"<PointField {label}{' + '.join(parts) or '0'}>"


@dataclass(eq=False)
class ProlongedField:
    """Prolongation of a point field to jets of order <= k."""

    base: PointField
    order: int
    jet_coeffs: dict[JetVar, Expr]

    def coeff(self, w: JetVar) -> Expr:
        return self.jet_coeffs[w]

    def apply(self, e: Expr) -> Expr:
        """Directional derivative over base, fiber and jet variables."""
        e = sp.sympify(e)
        if max_order(e) > self.order:
            raise ValueError(
                f"expression has jet order {max_order(e)} > prolongation order {self.order}")
        out = self.base.coeffs["t"] * sp.diff(e, t) + self.base.coeffs["a"] * sp.diff(e, a)
        for w, c in self.jet_coeffs.items():
            out += c * sp.diff(e, w.symbol)
        return out


def prolong(X: PointField, k: int) -> ProlongedField:
    """Standard k-th prolongation; cached on the field."""
    if k < 0:
        raise ValueError("prolongation order must be >= 0")
    cached = X._prolongations.get(k)
    if cached is not None:
        return cached
    xi_t = X.coeffs["t"]
    xi_a = X.coeffs["a"]
    jet_coeffs: dict[JetVar, Expr] = {
        JetVar(f, 0, 0): X.coeffs[f] for f in FIBER_NAMES
    }
    for order in range(k):
        for f in FIBER_NAMES:
            for i in range(order + 2):
                j = order + 1 - i
                w = JetVar(f, i, j)
                if i >= 1:
                    parent, x = JetVar(f, i - 1, j), t
                else:
                    parent, x = JetVar(f, i, j - 1), a
                phi = jet_coeffs[parent]
                c = (total_derivative(phi, x)
                     - parent.raised(t).symbol * total_derivative(xi_t, x)
                     - parent.raised(a).symbol * total_derivative(xi_a, x))
                jet_coeffs[w] = sp.expand(c)
    result = ProlongedField(X, k, jet_coeffs)
    X._prolongations[k] = result
    return result


def apply(Xk: ProlongedField, e: Expr) -> Expr:
    return Xk.apply(e)

"""Exact symbolic kernel: symbol table, parsing, differentiation, zero testing.

Expressions are sympy objects over a fixed table of named symbols.  The
grammar is plain infix with ``^`` for powers and underscore jet names
(``u_t``, ``rho_ta``, ``T_aa``, ...); :func:`pprint` emits the same grammar
so expressions round-trip through text.
"""

from __future__ import annotations

import random
from fractions import Fraction

import sympy as sp

Expr = sp.Expr

# kinds: "base" (independent variables), "fiber" (unknown fields),
# "jet" (derivative coordinates), "param" (constants of the paper-level data)
BASE_NAMES = ("t", "a")
FIBER_NAMES = ("u", "p", "rho", "s", "T")
PARAM_NAMES = (
    "lambda", "lambda1", "lambda2", "g", "k",
    "gamma1", "gamma2", "gamma3", "gamma4", "gamma5",
    "xi1", "xi2", "xi3", "xi4", "xi5", "xi6",
    "C1", "C2", "s0", "a0", "h0",
)

_FUNCTIONS = {
    "sin": sp.sin,
    "cos": sp.cos,
    "exp": sp.exp,
    "ln": sp.log,
    "arccos": sp.acos,
    "arctan": sp.atan,
    "sqrt": sp.sqrt,
}


class SymbolTableError(ValueError):
    """Unknown or conflicting symbol name."""


class ParseError(ValueError):
    """Syntax error; carries the 0-based position in the source text."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class UndecidedZeroTest(RuntimeError):
    """Sampling-based zero test could not evaluate any probe point."""


class _SymbolTable:
    """Registry of all known symbols; jet symbols are created on demand."""

    def __init__(self):
        self._symbols: dict[str, sp.Symbol] = {}
        self._kinds: dict[str, str] = {}
        self._jet_index: dict[sp.Symbol, tuple[str, int, int]] = {}
        self._irrational: set[str] = set()
        for n in BASE_NAMES:
            self._add(n, "base")
        for n in FIBER_NAMES:
            self._add(n, "fiber")
            self._jet_index[self._symbols[n]] = (n, 0, 0)
        for n in PARAM_NAMES:
            self._add(n, "param")

    def _add(self, name: str, kind: str) -> sp.Symbol:
        sym = sp.Symbol(name)
        self._symbols[name] = sym
        self._kinds[name] = kind
        return sym

    def lookup(self, name: str) -> sp.Symbol:
        if name in self._symbols:
            return self._symbols[name]
        jet = _parse_jet_name(name)
        if jet is not None:
            return self.jet(*jet)
        raise SymbolTableError(f"unknown symbol {name!r}")

    def kind(self, sym: sp.Symbol) -> str:
        return self._kinds[sym.name]

    def jet(self, field: str, i: int, j: int) -> sp.Symbol:
        """Jet coordinate of `field` with i t-derivatives and j a-derivatives."""
        if field not in FIBER_NAMES:
            raise SymbolTableError(f"{field!r} is not a fiber variable")
        if i < 0 or j < 0:
            raise ValueError("negative jet multi-index")
        if i == 0 and j == 0:
            return self._symbols[field]
        name = field + "_" + "t" * i + "a" * j
        if name not in self._symbols:
            sym = self._add(name, "jet")
            self._jet_index[sym] = (field, i, j)
        return self._symbols[name]

    def jet_index(self, sym: sp.Symbol):
        """(field, i, j) for fiber/jet symbols, else None."""
        return self._jet_index.get(sym)

    def parameter(self, name: str, irrational: bool = False) -> sp.Symbol:
        """Fetch or declare a parameter; `irrational` tags exponents that must
        not be treated as ratios of integers."""
        if name in self._symbols:
            if self._kinds[name] != "param":
                raise SymbolTableError(f"{name!r} already used as {self._kinds[name]}")
        else:
            self._add(name, "param")
        if irrational:
            self._irrational.add(name)  # marker only; no arithmetic effect
        return self._symbols[name]

    def is_irrational(self, sym: sp.Symbol) -> bool:
        return sym.name in self._irrational


def _parse_jet_name(name: str):
    if "_" not in name:
        return None
    field, _, suffix = name.partition("_")
    if field not in FIBER_NAMES or not suffix:
        return None
    i = 0
    while i < len(suffix) and suffix[i] == "t":
        i += 1
    j = len(suffix) - i
    if suffix[i:] != "a" * j:
        return None
    return field, i, j


TABLE = _SymbolTable()

t, a = (TABLE.lookup(n) for n in BASE_NAMES)
u, p, rho, s, T = (TABLE.lookup(n) for n in FIBER_NAMES)


def sym(name: str) -> sp.Symbol:
    return TABLE.lookup(name)


def jet(field: str, i: int, j: int) -> sp.Symbol:
    return TABLE.jet(field, i, j)


# --- parser -----------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def parse(self) -> Expr:
        e = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            raise ParseError("unexpected trailing input", self.pos)
        return e

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expr(self) -> Expr:
        e = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.unary()
            e = e * rhs if op == "*" else e / rhs
        return e

    def unary(self) -> Expr:
        c = self.peek()
        if c == "-":
            self.pos += 1
            return -self.unary()
        if c == "+":
            self.pos += 1
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            return base ** self.unary()
        return base

    def atom(self) -> Expr:
        c = self.peek()
        start = self.pos
        if c == "(":
            self.pos += 1
            e = self.expr()
            if self.peek() != ")":
                raise ParseError("expected ')'", self.pos)
            self.pos += 1
            return e
        if c.isdigit():
            return self.number()
        if c.isalpha() or c == "_":
            name = self.name()
            if name in _FUNCTIONS:
                if self.peek() != "(":
                    raise ParseError(f"function {name!r} needs an argument", self.pos)
                self.pos += 1
                arg = self.expr()
                if self.peek() != ")":
                    raise ParseError("expected ')'", self.pos)
                self.pos += 1
                return _FUNCTIONS[name](arg)
            try:
                return TABLE.lookup(name)
            except SymbolTableError as exc:
                raise ParseError(str(exc), start)
        raise ParseError("expected an expression", self.pos)

    def number(self) -> Expr:
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isdigit() or self.text[self.pos] == "."):
            self.pos += 1
        token = self.text[start:self.pos]
        if token.count(".") > 1:
            raise ParseError(f"bad number {token!r}", start)
        return sp.Rational(Fraction(token))

    def name(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start:self.pos]


def parse(text: str) -> Expr:
    """Parse an infix expression over the known symbols."""
    return _Parser(text).parse()


def pprint(e: Expr) -> str:
    """Print in the same grammar `parse` accepts."""
    out = sp.sstr(sp.sympify(e))
    out = out.replace("**", "^")
    out = out.replace("log(", "ln(")
    out = out.replace("acos(", "arccos(")
    out = out.replace("atan(", "arctan(")
    return out


# --- calculus and normal forms ----------------------------------------------

def differentiate(e: Expr, x: sp.Symbol) -> Expr:
    """Partial derivative; all other symbols (jets included) held fixed."""
    return sp.diff(sp.sympify(e), x)


def is_rational_expr(e: Expr) -> bool:
    """True when e is a rational function of its free symbols."""
    e = sp.sympify(e)
    if e.atoms(sp.Function):
        return False
    return all(pw.exp.is_Integer for pw in e.atoms(sp.Pow))


def normalize(e: Expr) -> Expr:
    """Canonical form; idempotent.  Exact rational normal form on the rational
    fragment, plain expansion elsewhere."""
    e = sp.sympify(e)
    if is_rational_expr(e):
        return sp.cancel(sp.together(e))
    return sp.expand(e)


def eval_at(e: Expr, assignment: dict) -> float:
    """Numeric value at a point; extended precision internally."""
    val = sp.sympify(e).subs(assignment).evalf(30)
    if not val.is_real:
        if val.is_number and abs(sp.im(val)) < sp.Float("1e-25"):
            val = sp.re(val)
        else:
            raise ValueError(f"non-real value {val}")
    return float(val)


def _sample_assignment(symbols, rng: random.Random, positive=()) -> dict:
    out = {}
    for sm in symbols:
        num = rng.randint(1, 40) * (1 if sm in positive else rng.choice((1, -1)))
        den = rng.randint(7, 23)
        out[sm] = sp.Rational(num, den)
    return out


def _power_bases(e: Expr):
    """Symbols appearing as the base of a non-integer power; such powers are
    read on the positive real branch, so probe points keep these positive."""
    out = set()
    for pw in e.atoms(sp.Pow):
        if not pw.exp.is_Integer:
            out |= pw.base.free_symbols
    return out


def is_zero(e: Expr, rng: random.Random | None = None, n_points: int = 20,
            rel_tol: float = 1e-9) -> bool:
    """Decide whether e vanishes identically.

    Exact on the rational fragment; otherwise identity rewriting
    (sin^2+cos^2, exp/ln cancellation) followed by probabilistic sampling.
    Raises UndecidedZeroTest when every probe point hits a domain error.
    """
    e = sp.sympify(e)
    if e.is_zero is True:
        return True
    e = sp.expand(e)
    if e == 0:
        return True
    if e.is_number:
        return sp.simplify(e) == 0
    if is_rational_expr(e):
        return sp.cancel(sp.together(e)) == 0
    # transcendental fragment: rewrite then simplify (skipped on very large
    # expressions where sympy's simplify is prohibitively slow)
    r = sp.expand(sp.powsimp(e, force=True))
    if r == 0:
        return True
    if sp.count_ops(r) <= 200:
        r = sp.simplify(r)
        if r == 0:
            return True
    if r.is_number:
        return False
    # probabilistic fallback
    rng = rng or random.Random(0)
    terms = sp.Add.make_args(sp.expand(r))
    positive = _power_bases(r)
    good = 0
    for _ in range(n_points):
        assignment = _sample_assignment(sorted(r.free_symbols, key=lambda x: x.name),
                                        rng, positive)
        try:
            val = complex(r.subs(assignment).evalf(40))
            scale = sum(abs(complex(tm.subs(assignment).evalf(40))) for tm in terms)
        except (TypeError, ValueError, ZeroDivisionError):
            continue
        scale = max(scale, 1.0)
        if abs(val) > rel_tol * scale:
            return False
        good += 1
    if good == 0:
        raise UndecidedZeroTest(f"no evaluable probe points for {r}")
    return True


def struct_eq(e1: Expr, e2: Expr) -> bool:
    """Structural (tree) equality after sympy's automatic canonical ordering."""
    return sp.sympify(e1) == sp.sympify(e2)

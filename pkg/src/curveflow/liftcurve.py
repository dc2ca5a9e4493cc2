"""Numeric lifting of plane curves: arc length, per-case lifting functions
(closed-form, parametric inversion, or ODE integration) and verification of
the defining relation against the height profile h(a)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .eulersys import HCase


class LiftDomainError(ValueError):
    """Initial value or curve leaves the case's admissible domain."""


class IrregularCurve(ValueError):
    """Non-monotone parameter grid or vanishing tangent."""


DEFAULT_QUAD_TOL = 1e-10
DEFAULT_ROOT_TOL = 1e-12
DEFAULT_ODE_RTOL = 1e-9


@dataclass(frozen=True)
class PlaneCurve:
    """Sampled regular plane curve with tangent samples."""

    tau: np.ndarray
    x: np.ndarray
    y: np.ndarray
    x_tau: np.ndarray
    y_tau: np.ndarray

    def __post_init__(self):
        for name in ("tau", "x", "y", "x_tau", "y_tau"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = self.tau.size
        if any(getattr(self, name).size != n for name in ("x", "y", "x_tau", "y_tau")):
            raise IrregularCurve("sample arrays must share one length")
        if n < 5:
            raise IrregularCurve("need at least 5 samples")
        if not np.all(np.diff(self.tau) > 0):
            raise IrregularCurve("parameter grid must be strictly increasing")
        if np.any(self.speed() <= 0):
            raise IrregularCurve("tangent vanishes: curve is not regular")

    def speed(self) -> np.ndarray:
        return np.hypot(self.x_tau, self.y_tau)


def unit_circle(n: int = 2001, tau_max: float = 2 * math.pi) -> PlaneCurve:
    """Built-in unit circle (cos tau, sin tau) on [0, tau_max]."""
    tau = np.linspace(0.0, tau_max, n)
    return PlaneCurve(tau, np.cos(tau), np.sin(tau), -np.sin(tau), np.cos(tau))


def curve_from_xy(tau, x, y) -> PlaneCurve:
    """Curve from position samples only; tangents by 4th-order differences."""
    tau = np.asarray(tau, dtype=float)
    return PlaneCurve(tau, x, y, _derivative(np.asarray(x, float), tau),
                      _derivative(np.asarray(y, float), tau))


def _onesided_weights(k: int, m: int = 7) -> np.ndarray:
    """First-derivative weights at node k of an m-point uniform stencil."""
    offsets = np.arange(m) - k
    A = np.vander(offsets, m, increasing=True).T / np.array(
        [math.factorial(i) for i in range(m)])[:, None]
    b = np.zeros(m)
    b[1] = 1.0
    return np.linalg.solve(A, b)


def _derivative(f: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """d f / d tau; on uniform grids 4th-order central differences with
    6th-order one-sided boundary stencils, np.gradient otherwise."""
    h = np.diff(tau)
    if not np.allclose(h, h[0], rtol=1e-10, atol=0):
        return np.gradient(f, tau, edge_order=2)
    h0 = h[0]
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h0)
    m = min(7, f.size)
    for k in (0, 1):
        w = _onesided_weights(k, m)
        out[k] = w @ f[:m] / h0
        out[-1 - k] = -(w @ f[-1:-m - 1:-1]) / h0
    return out


def arc_length(curve: PlaneCurve) -> np.ndarray:
    """Cumulative plane arc length by composite Simpson quadrature."""
    return cumulative_simpson(curve.speed(), x=curve.tau, initial=0.0)


@dataclass(frozen=True)
class LiftResult:
    tau: np.ndarray
    l: np.ndarray
    z: np.ndarray
    a: np.ndarray
    max_ode_residual: float
    branch: str
    case_tag: str


def _case_floats(case: HCase) -> tuple[float, ...]:
    return tuple(float(p) for p in case.params)


def _sign(branch: str) -> float:
    if branch not in ("+", "-"):
        raise ValueError(f"branch must be '+' or '-', got {branch!r}")
    return 1.0 if branch == "+" else -1.0


def _invert_increasing(F, target: float, lo: float, hi: float,
                       tol: float) -> float:
    """Solve F(t) = target for the increasing F on [lo, hi]."""
    f_lo, f_hi = F(lo), F(hi)
    if not (f_lo - tol <= target <= f_hi + tol):
        raise LiftDomainError(
            f"arc length leaves the parametric range: target {target:.6g} "
            f"not in [{f_lo:.6g}, {f_hi:.6g}]")
    target = min(max(target, f_lo), f_hi)
    return brentq(lambda t: F(t) - target, lo, hi, xtol=tol, rtol=1e-15)


def _parametric_lift(l: np.ndarray, F, z_of_t, t0: float, sign: float,
                     t_lo: float, t_hi: float, tol: float) -> np.ndarray:
    """z on the grid for relations F(t) = F(t0) + sign * scale * l already
    folded into l; F increasing on (t_lo, t_hi)."""
    base = F(t0)
    out = np.empty_like(l)
    for i, li in enumerate(l):
        ti = _invert_increasing(F, base + sign * li, t_lo, t_hi, tol)
        out[i] = z_of_t(ti)
    return out


def lift(case: HCase, curve: PlaneCurve, z0: float, branch: str = "+",
         root_tol: float = DEFAULT_ROOT_TOL,
         ode_rtol: float = DEFAULT_ODE_RTOL) -> LiftResult:
    """Lifting function z on the curve's grid with z(tau_0) = z0.

    branch '+' makes z nondecreasing along the curve, '-' nonincreasing.
    """
    sgn = _sign(branch)
    l = arc_length(curve)
    z0 = float(z0)
    eps = 1e-13

    if case.tag == HCase.CONST:
        z = np.full_like(l, z0)
    elif case.tag == HCase.LINEAR:
        (lam,) = _case_floats(case)
        if not 1 - lam ** 2 > 0:
            raise LiftDomainError("need 1 - lambda^2 > 0")
        z = sgn * abs(lam) / math.sqrt(1 - lam ** 2) * l + z0
    elif case.tag == HCase.QUADRATIC:
        (lam,) = _case_floats(case)
        if not 0 < lam * z0 < 0.25:
            raise LiftDomainError("need 0 < lambda*z0 < 1/4")
        t0 = math.acos(math.sqrt(4 * lam * z0))
        # F increasing on (0, pi/2); z = cos^2(t)/(4 lam) decreasing in t
        F = lambda t: t - math.sin(t) * math.cos(t)
        z = _parametric_lift(4 * lam * l, F, lambda t: math.cos(t) ** 2 / (4 * lam),
                             t0, -sgn, eps, math.pi / 2 - eps, root_tol)
    elif case.tag == HCase.POWER:
        lam1, lam2 = _case_floats(case)
        z = _integrate_power(case, curve, z0, sgn, ode_rtol)
    elif case.tag == HCase.EXP:
        _, lam2 = _case_floats(case)
        if not (z0 > 0 and 1 - lam2 ** 2 * z0 ** 2 > 0):
            raise LiftDomainError("need 0 < lambda2*z0 < 1")
        t0 = math.acos(lam2 * z0)
        F = lambda t: math.atanh(math.sin(t)) - math.sin(t)
        # atanh(sin t) overflows in double precision too close to pi/2
        z = _parametric_lift(abs(lam2) * l, F, lambda t: math.cos(t) / lam2,
                             t0, -sgn, eps, math.pi / 2 - 1e-6, root_tol)
    elif case.tag == HCase.LOG:
        if not z0 > 0:
            raise LiftDomainError("need exp(2*z0) - 1 > 0, i.e. z0 > 0")
        t0 = math.acos(math.exp(-z0))
        F = lambda t: math.tan(t) - t
        z = _parametric_lift(l, F, lambda t: -math.log(math.cos(t)),
                             t0, sgn, eps, math.pi / 2 - eps, root_tol)
    elif case.tag == HCase.GENERIC:
        raise ValueError("lifting is defined for the six explicit height cases")
    else:
        raise ValueError(case.tag)

    z_tau = _derivative(z, curve.tau)
    a = cumulative_simpson(np.sqrt(curve.speed() ** 2 + z_tau ** 2),
                           x=curve.tau, initial=0.0)
    residual = float(np.max(np.abs(_ode_residual(case, curve, z, z_tau))))
    return LiftResult(curve.tau.copy(), l, z, a, residual, branch, case.tag)


def _integrate_power(case: HCase, curve: PlaneCurve, z0: float, sgn: float,
                     rtol: float) -> np.ndarray:
    """Adaptive integration of z_tau = sgn * lam2*z*speed /
    sqrt((z/lam1)^(2/lam2) - lam2^2 z^2) from z(tau_0) = z0."""
    lam1, lam2 = _case_floats(case)
    if lam1 <= 0 or z0 <= 0:
        raise LiftDomainError("need lambda1 > 0 and z0 > 0")
    if (z0 / lam1) ** (2 / lam2) - lam2 ** 2 * z0 ** 2 <= 0:
        raise LiftDomainError("initial value outside (z/lambda1)^(2/lambda2) > lambda2^2 z^2")
    speed = CubicSpline(curve.tau, curve.speed())

    def rhs(tau, y):
        z = y[0]
        gap = (z / lam1) ** (2 / lam2) - lam2 ** 2 * z ** 2
        if gap <= 0:
            raise LiftDomainError("lift reached the domain boundary mid-curve")
        return [sgn * abs(lam2) * z * speed(tau) / math.sqrt(gap)]

    sol = solve_ivp(rhs, (curve.tau[0], curve.tau[-1]), [z0], t_eval=curve.tau,
                    rtol=rtol, atol=rtol * max(z0, 1e-12), method="RK45",
                    max_step=(curve.tau[-1] - curve.tau[0]) / 50)
    if not sol.success:
        raise LiftDomainError(f"lift integration failed: {sol.message}")
    return sol.y[0]


def _ode_residual(case: HCase, curve: PlaneCurve, z: np.ndarray,
                  z_tau: np.ndarray) -> np.ndarray:
    """Pointwise residual of the case's defining lifting ODE."""
    sp2 = curve.speed() ** 2
    if case.tag == HCase.CONST:
        return z_tau
    if case.tag == HCase.LINEAR:
        (lam,) = _case_floats(case)
        return (1 - lam ** 2) * z_tau ** 2 - lam ** 2 * sp2
    if case.tag == HCase.QUADRATIC:
        (lam,) = _case_floats(case)
        return (1 - 4 * lam * z) * z_tau ** 2 - 4 * lam * z * sp2
    if case.tag == HCase.POWER:
        lam1, lam2 = _case_floats(case)
        return (z_tau ** 2 * ((z / lam1) ** (2 / lam2) - lam2 ** 2 * z ** 2)
                - lam2 ** 2 * z ** 2 * sp2)
    if case.tag == HCase.EXP:
        _, lam2 = _case_floats(case)
        return z_tau ** 2 * (1 - lam2 ** 2 * z ** 2) - lam2 ** 2 * z ** 2 * sp2
    if case.tag == HCase.LOG:
        return z_tau ** 2 * (np.exp(2 * z) - 1) - sp2
    raise ValueError(case.tag)


def verify(case: HCase, result: LiftResult, curve: PlaneCurve) -> dict:
    """Defining-ODE and height-relation residuals of a lift.

    The height relation compares z(tau) against h(sign*a + shift) where the
    shift is fixed by the initial value; this is the member of the case's
    height family the lift realizes.
    """
    sgn = _sign(result.branch)
    z, a = result.z, result.a
    z0 = float(z[0])
    if case.tag == HCase.CONST:
        model = np.full_like(z, z0)
    elif case.tag == HCase.LINEAR:
        (lam,) = _case_floats(case)
        model = z0 + sgn * abs(lam) * a
    elif case.tag == HCase.QUADRATIC:
        (lam,) = _case_floats(case)
        shift = math.sqrt(z0 / lam)
        model = lam * (shift + sgn * a) ** 2
    elif case.tag == HCase.POWER:
        lam1, lam2 = _case_floats(case)
        shift = (z0 / lam1) ** (1 / lam2)
        model = lam1 * (shift + sgn * a) ** lam2
    elif case.tag == HCase.EXP:
        _, lam2 = _case_floats(case)
        model = z0 * np.exp(sgn * abs(lam2) * a)
    elif case.tag == HCase.LOG:
        shift = math.exp(z0)
        model = np.log(shift + sgn * a)
    else:
        raise ValueError(case.tag)
    h_res = float(np.max(np.abs(z - model)))
    scale = float(np.max(np.abs(z))) or 1.0
    return {
        "max_ode_residual": result.max_ode_residual,
        "h_residual": h_res,
        "h_residual_rel": h_res / scale,
    }


def write_csv(result: LiftResult, path: str):
    """CSV with columns exactly tau,l,z,a (consumed by the plot component)."""
    with open(path, "w", newline="") as fh:
        fh.write("tau,l,z,a\n")
        for row in zip(result.tau, result.l, result.z, result.a):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_csv(path: str) -> LiftResult:
    """Read back a lift CSV (tau,l,z,a)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    with open(path) as fh:
        header = fh.readline().strip()
    if header != "tau,l,z,a":
        raise ValueError(f"expected header 'tau,l,z,a', got {header!r}")
    if data.shape[1] != 4:
        raise ValueError("expected exactly 4 columns")
    return LiftResult(data[:, 0], data[:, 1], data[:, 2], data[:, 3],
                      float("nan"), "+", "unknown")

"""Trapezoidal rule, kernel quadrature weights, and sharp trapezoid error bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import NonUniformNodesError, UnsupportedSpaceError
from .function_bank import (
    INF,
    Holder,
    Sobolev,
    TestFunction,
    holder_seminorm_estimate,
    lp_norm,
    seminorm,
    sup_sample_points,
)
from .interpolation import NodeSet, as_nodeset, solve_coefficients
from .kernel_core import KernelModel, evaluate_kernel

BOUND_IDS = ("cu_a", "cu_b", "cu_c_rate_only", "cu_d", "sampling_p", "superconv_theta1")
SATISFIED_RTOL = 1e-12
# rounding slack for bounds whose rhs is exactly zero (e.g. affine f)
SATISFIED_ATOL = 1e-14


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: NodeSet
    weights: np.ndarray
    label: str

    def apply(self, f) -> float:
        return apply(self, f)


def apply(rule: QuadratureRule, f) -> float:
    return float(np.dot(rule.weights, f(rule.nodes.nodes)))


def trapezoid_rule(nodes) -> QuadratureRule:
    ns = as_nodeset(nodes)
    ns.require_endpoints("the trapezoidal rule")
    d = np.diff(ns.nodes)
    w = np.zeros(len(ns))
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    w.flags.writeable = False
    return QuadratureRule(ns, w, "trapezoid")


def translate_integrals(m: KernelModel, nodes) -> np.ndarray:
    """z_i = int_0^1 K(x_i, y) dy, exact: each translate is affine on [0, x_i] and [x_i, 1]."""
    x = as_nodeset(nodes).nodes
    k0 = evaluate_kernel(m, x, 0.0)
    kx = evaluate_kernel(m, x, x)
    k1 = evaluate_kernel(m, x, 1.0)
    return 0.5 * x * (k0 + kx) + 0.5 * (1.0 - x) * (kx + k1)


def kernel_quadrature_weights(m: KernelModel, nodes) -> QuadratureRule:
    """Weights w solving K w = z, i.e. the integral of the kernel interpolant."""
    ns = as_nodeset(nodes)
    z = translate_integrals(m, ns)
    w = solve_coefficients(m, ns, z).coefficients
    return QuadratureRule(ns, w, f"kernel[{m.kind.value}]")


def holder_conjugate(p: float) -> float:
    if not p >= 1:
        raise ValueError(f"Holder conjugate needs p >= 1, got {p!r}")
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def beta_function(a: float, b: float) -> float:
    if not (a > 0 and b > 0):
        raise ValueError(f"beta function needs positive arguments, got ({a!r}, {b!r})")
    if float(a).is_integer() and float(b).is_integer() and a <= 20 and b <= 20:
        i, j = int(a), int(b)
        return float(Fraction(math.factorial(i - 1) * math.factorial(j - 1), math.factorial(i + j - 1)))
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


@dataclass(frozen=True)
class BoundReport:
    """lhs <= rhs (1 + 1e-12) + 1e-14 comparison for one error bound.

    ``constant`` and ``rhs`` are None for rate-only bounds; ``lhs`` and
    ``satisfied`` are None until a measured error is attached.
    """

    bound_id: str
    constant: Optional[float]
    rate_exponent: float
    rhs: Optional[float]
    lhs: Optional[float] = None
    satisfied: Optional[bool] = None

    def with_lhs(self, lhs: float) -> "BoundReport":
        ok = None if self.rhs is None else bool(lhs <= self.rhs * (1.0 + SATISFIED_RTOL) + SATISFIED_ATOL)
        return replace(self, lhs=float(lhs), satisfied=ok)


def trapezoid_constant(bound_id: str, alpha: Optional[float] = None, p: Optional[float] = None) -> Optional[float]:
    """Sharp constants for uniform nodes.

    cu_d uses B(q+1, q+1)**(1/q) / 2 with q the conjugate of p: the L_q norm
    of the Peano kernel t(1/n - t)/2. At p = inf (q = 1) this is B(2, 2)/2.
    """
    if bound_id == "cu_a":
        _need(alpha, "alpha", bound_id)
        return 1.0 / ((1.0 + alpha) * 2.0**alpha)
    if bound_id == "cu_b":
        _need(p, "p", bound_id)
        q = holder_conjugate(p)
        if q == INF:
            return 0.5
        return 1.0 / (2.0 * (q + 1.0) ** (1.0 / q))
    if bound_id == "cu_c_rate_only":
        return None
    if bound_id == "cu_d":
        _need(p, "p", bound_id)
        q = holder_conjugate(p)
        if q == INF:
            # limit of B(q+1, q+1)**(1/q): max of t(1 - t) = 1/4
            return 0.125
        return beta_function(q + 1.0, q + 1.0) ** (1.0 / q) / 2.0
    raise ValueError(f"unknown trapezoid bound {bound_id!r}; expected one of cu_a, cu_b, cu_c_rate_only, cu_d")


def trapezoid_rate(bound_id: str, alpha: Optional[float] = None) -> float:
    if bound_id == "cu_a":
        return float(alpha)
    if bound_id == "cu_b":
        return 1.0
    if bound_id == "cu_c_rate_only":
        _need(alpha, "alpha", bound_id)
        return 1.0 + alpha
    if bound_id == "cu_d":
        return 2.0
    raise ValueError(f"unknown trapezoid bound {bound_id!r}")


def _need(v, name, bound_id):
    if v is None:
        raise ValueError(f"{bound_id} needs {name}")


def trapezoid_bound(bound_id: str, n: int, *, alpha: Optional[float] = None, p: Optional[float] = None,
                    seminorm_value: Optional[float] = None) -> BoundReport:
    """Right-hand side constant * n**-rate * seminorm for x_i = i/n."""
    const = trapezoid_constant(bound_id, alpha=alpha, p=p)
    rate = trapezoid_rate(bound_id, alpha=alpha)
    if const is None:
        return BoundReport(bound_id, None, rate, None)
    if seminorm_value is None:
        raise ValueError(f"{bound_id} needs a seminorm value")
    return BoundReport(bound_id, const, rate, const * float(n) ** (-rate) * seminorm_value)


def golden_section(fun, a: float, b: float, tol: float = 1e-8, maxiter: int = 200) -> tuple[float, float]:
    """Minimise a unimodal ``fun`` on [a, b]; returns (argmin, min)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(maxiter):
        if abs(b - a) <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    r = 0.5 * (a + b)
    return r, fun(r)


def _slope_bracket(f: TestFunction) -> tuple[float, float]:
    if f.d1 is not None:
        with np.errstate(invalid="ignore"):
            v = f.d1(sup_sample_points(f.singular_points))
    else:
        x = np.linspace(0.0, 1.0, 1001)
        v = np.diff(f(x)) / np.diff(x)
    v = v[np.isfinite(v)]
    return float(v.min()) - 1.0, float(v.max()) + 1.0


def _sign_changes(g, singular, count: int = 2001) -> list[float]:
    """Roots of g on [0, 1], located by a sign scan and refined with Brent's method."""
    x = np.unique(np.concatenate([np.linspace(0.0, 1.0, count), np.asarray(singular, dtype=float)]))
    with np.errstate(all="ignore"):
        v = g(x)
    roots = []
    for a, b, va, vb in zip(x[:-1], x[1:], v[:-1], v[1:]):
        if np.isfinite(va) and np.isfinite(vb) and va * vb < 0:
            roots.append(brentq(lambda t: float(g(np.array(t))), a, b, xtol=1e-15))
    return roots


def _shifted_lp(d1, r: float, p: float, singular) -> float:
    # |d1 - r| has a kink wherever d1 = r; make those panel edges
    g = lambda x: d1(x) - r  # noqa: E731
    pts = _sign_changes(g, singular) if p != INF else ()
    return lp_norm(g, p, singular, pts)


def inf_shifted_seminorm(f: TestFunction, space) -> float:
    """inf over r of the seminorm of f(x) - r x in Holder(0, alpha) or Sobolev(p, 1)."""
    if isinstance(space, Sobolev):
        if space.sigma != 1:
            raise UnsupportedSpaceError("shifted seminorms are defined for first-order Sobolev spaces")
        d1 = f.derivative(1)
        if space.p == 2:
            r = f(1.0) - f(0.0)
            return lp_norm(lambda x: d1(x) - r, 2, f.singular_points)
        lo, hi = _slope_bracket(f)
        return golden_section(lambda r: _shifted_lp(d1, r, space.p, f.singular_points), lo, hi)[1]
    if isinstance(space, Holder):
        if space.s != 0:
            raise UnsupportedSpaceError("shifted seminorms are defined for C^{0,alpha}")
        lo, hi = _slope_bracket(f)
        if space.alpha == 1.0 and f.d1 is not None:
            return golden_section(lambda r: lp_norm(lambda x: f.d1(x) - r, INF, f.singular_points), lo, hi)[1]
        return golden_section(lambda r: holder_seminorm_estimate(lambda x: f(x) - r * x, space.alpha), lo, hi)[1]
    raise UnsupportedSpaceError(f"no shifted seminorm for {space!r}")


def check_trapezoid_bound(f: TestFunction, nodes, bound_id: str, *, alpha: Optional[float] = None,
                          p: Optional[float] = None) -> BoundReport:
    """|I(f) - T_n(f)| against the bound for ``bound_id``; nodes must be x_i = i/n."""
    ns = as_nodeset(nodes)
    if not ns.is_uniform():
        raise NonUniformNodesError("trapezoid error bounds assume x_i = i/n")
    err = abs(f.exact_integral() - apply(trapezoid_rule(ns), f))
    if bound_id == "cu_a":
        semi = inf_shifted_seminorm(f, Holder(0, alpha))
    elif bound_id == "cu_b":
        semi = inf_shifted_seminorm(f, Sobolev(p, 1))
    elif bound_id == "cu_d":
        semi = seminorm(f, Sobolev(p, 2))
    else:
        semi = None
    return trapezoid_bound(bound_id, ns.n, alpha=alpha, p=p, seminorm_value=semi).with_lhs(err)

"""Interpolation error measurement, refinement studies and predicted exponents."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from . import _quad
from .errors import DegenerateFitError, MissingDerivativeError, UnsupportedSpaceError
from .function_bank import INF, Besov, Holder, Sobolev, TestFunction, get_function
from .interpolation import NodeSet, as_nodeset, piecewise_linear, solve_coefficients
from .kernel_core import KernelModel, KernelParams, rkhs_inner_product
from .quadrature import BoundReport

ERROR_FLOOR = 1e-13
SUP_SAMPLES_PER_PANEL = 65
SOURCES = ("spline_a", "spline_b", "spline_c", "spline_de", "spline_f", "superconv_W1")


def _pos(x: float) -> float:
    return max(x, 0.0)


def _inv(p: float) -> float:
    return 0.0 if p == INF else 1.0 / p


def _check_r(r: float):
    if not 1.0 <= r <= INF:
        raise ValueError(f"error norm index r must lie in [1, inf], got {r!r}")


class Prediction(NamedTuple):
    exponent: float
    source: str


def predict_exponent(space, r: float) -> Prediction:
    """Exponent of h in the L_r linear-spline error for functions in ``space``."""
    _check_r(r)
    if isinstance(space, Besov) and space.p == space.q:
        space = Sobolev(space.p, space.sigma)
    if isinstance(space, Holder):
        gap = _pos(0.5 - _inv(r))
        if space.s == 0:
            return Prediction(space.alpha - gap, "spline_a")
        if space.s == 1:
            return Prediction(1.0 + space.alpha - gap, "spline_c")
        raise UnsupportedSpaceError(f"no linear-spline rate for C^{{{space.s},alpha}}; use s in {{0, 1}}")
    if isinstance(space, (Sobolev, Besov)):
        sigma = space.sigma
        gap = _pos(_inv(space.p) - _inv(r))
        if sigma == 1:
            return Prediction(1.0 - gap, "spline_b")
        if sigma == 2:
            return Prediction(2.0 - gap, "spline_f")
        if 1 < sigma < 2:
            return Prediction(sigma - gap, "spline_de")
        raise UnsupportedSpaceError(f"smoothness {sigma!r} outside [1, 2]")
    raise UnsupportedSpaceError(f"unknown space {space!r}")


def superconvergence_exponent(space, r: float) -> Optional[float]:
    """theta for u in W^theta_2, theta in [1, 2] and r = 2; None otherwise.

    theta = 3/2 is excluded: boundary conditions switch on there and the
    power-space identification is not available.
    """
    if isinstance(space, Besov) and space.p == space.q:
        space = Sobolev(space.p, space.sigma)
    if isinstance(space, Sobolev) and space.p == 2 and r == 2 and 1 <= space.sigma <= 2 and space.sigma != 1.5:
        return float(space.sigma)
    return None


@dataclass(frozen=True)
class RateSpec:
    function_id: str
    space: object
    r: float
    expected_exponent: float
    source: str

    def __post_init__(self):
        if self.expected_exponent < 0:
            raise ValueError("expected exponent must be >= 0")
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")


def rate_spec(f: Union[TestFunction, str], r: float = 2.0) -> RateSpec:
    """The membership of ``f`` with the largest predicted exponent in L_r.

    Open memberships contribute their supremum order.
    """
    if isinstance(f, str):
        f = get_function(f)
    best = None
    for m in f.memberships:
        try:
            pred = predict_exponent(m.space, r)
        except UnsupportedSpaceError:
            continue
        if best is None or pred.exponent > best[0].exponent:
            best = (pred, m.space)
    if best is None:
        raise UnsupportedSpaceError(f"{f.id!r} has no membership with a known rate")
    pred, space = best
    return RateSpec(f.id, space, float(r), max(pred.exponent, 0.0), pred.source)


@dataclass(frozen=True)
class RandomScheme:
    """Random node sets with quasi-uniformity ratio at most ``rho``."""

    seed: int = 0
    rho: float = 3.0

    def nodes(self, n: int) -> NodeSet:
        return NodeSet.random(n, np.random.default_rng([int(self.seed), int(n)]), self.rho)


UNIFORM = "uniform"


def build_nodes(scheme, n: int) -> NodeSet:
    if scheme == UNIFORM:
        return NodeSet.uniform(n)
    if isinstance(scheme, RandomScheme):
        return scheme.nodes(n)
    raise ValueError(f"unknown node scheme {scheme!r}")


def interpolate(f: TestFunction, nodes, model: Optional[KernelModel] = None):
    """Linear spline of ``f`` (``model=None``) or its kernel interpolant."""
    ns = as_nodeset(nodes)
    vals = f(ns.nodes)
    if model is None:
        return piecewise_linear(ns, vals)
    return solve_coefficients(model, ns, vals)


def measure_error(f: TestFunction, interpolant, r: float, quad_order: int = _quad.DEFAULT_ORDER) -> float:
    """||f - s||_{L_r(0,1)} on panels split at the interpolation nodes and f's singular points."""
    _check_r(r)
    brk = np.asarray(interpolant.breakpoints, dtype=float)
    if r == INF:
        edges = _quad.breakpoints(brk, f.singular_points, grade=False)
        t = np.linspace(0.0, 1.0, SUP_SAMPLES_PER_PANEL)
        x = (edges[:-1, None] + (edges[1:] - edges[:-1])[:, None] * t[None, :]).ravel()
        return float(np.max(np.abs(f(x) - interpolant(x))))
    val = _quad.integrate(lambda x: np.abs(f(x) - interpolant(x)) ** r, points=brk,
                          singular=f.singular_points, order=quad_order)
    return float(val ** (1.0 / r))


class FitResult(NamedTuple):
    slope: float
    r_squared: float
    used: int
    discarded: int


def fit_slope(h: Sequence[float], err: Sequence[float], floor: float = ERROR_FLOOR) -> FitResult:
    """Least-squares slope of log(err) against log(h).

    Rows with err <= floor are excluded; when five or more rows remain the two
    coarsest are dropped as pre-asymptotic.
    """
    h = np.asarray(h, dtype=float)
    e = np.asarray(err, dtype=float)
    keep = e > floor
    h, e = h[keep], e[keep]
    order = np.argsort(-h)  # coarsest first
    h, e = h[order], e[order]
    discarded = 2 if h.size >= 5 else 0
    h, e = h[discarded:], e[discarded:]
    if h.size < 3:
        raise DegenerateFitError(
            f"only {h.size} refinement levels have error above {floor:g}; "
            "the function is reproduced exactly (or nearly) and has no measurable rate"
        )
    X, Y = np.log(h), np.log(e)
    slope, icept = np.polyfit(X, Y, 1)
    resid = Y - (slope * X + icept)
    ss_tot = float(np.sum((Y - Y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return FitResult(float(slope), r2, int(h.size), discarded)


@dataclass(frozen=True, eq=False)
class RateStudy:
    spec: RateSpec
    model: Optional[KernelModel]
    node_scheme: object
    levels: tuple
    rows: tuple  # (n, h, error)
    fitted_slope: float = math.nan
    r_squared: float = math.nan
    fit_error: Optional[str] = None

    @property
    def deviation(self) -> float:
        return self.fitted_slope - self.spec.expected_exponent


def run_study(spec: RateSpec, model: Optional[KernelModel] = None, node_scheme=UNIFORM,
              levels: Sequence[int] = (16, 32, 64, 128, 256, 512), quad_order: int = _quad.DEFAULT_ORDER,
              f: Optional[TestFunction] = None, strict: bool = True) -> RateStudy:
    """Refine over ``levels`` and fit the convergence slope.

    ``model=None`` interpolates with linear splines directly; otherwise with
    the kernel interpolant of ``model``. With ``strict=False`` a degenerate fit
    is recorded in ``fit_error`` instead of raised.
    """
    levels = tuple(int(n) for n in levels)
    if any(n < 2 for n in levels):
        raise ValueError("all levels must be >= 2")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must be strictly increasing")
    f = f if f is not None else get_function(spec.function_id)
    rows = []
    for n in levels:
        ns = build_nodes(node_scheme, n)
        s = interpolate(f, ns, model)
        rows.append((n, ns.h, measure_error(f, s, spec.r, quad_order)))
    rows = tuple(rows)
    try:
        fit = fit_slope([r[1] for r in rows], [r[2] for r in rows])
    except DegenerateFitError as err:
        if strict:
            raise
        return RateStudy(spec, model, node_scheme, levels, rows, fit_error=str(err))
    return RateStudy(spec, model, node_scheme, levels, rows, fit.slope, fit.r_squared)


def _w1p_difference(f: TestFunction, s, p: float, quad_order: int) -> float:
    if f.d1 is None:
        raise MissingDerivativeError(f"{f.id!r} has no first derivative")
    val = _quad.integrate(lambda x: np.abs(f.d1(x) - s.d1(x)) ** p, points=s.breakpoints,
                          singular=f.singular_points, order=quad_order)
    return float(val ** (1.0 / p))


def check_sampling_inequality(f: TestFunction, p: float, nodes, interpolant=None,
                              quad_order: int = _quad.DEFAULT_ORDER) -> BoundReport:
    """||f - s||_{L_p} <= p**(-1/p) h |f - s|_{W^1_p} for s vanishing-error at the nodes."""
    if not 1.0 <= p < INF:
        raise ValueError(f"sampling inequality needs p in [1, inf), got {p!r}")
    ns = as_nodeset(nodes)
    s = interpolant if interpolant is not None else interpolate(f, ns)
    const = p ** (-1.0 / p)
    rhs = const * ns.h * _w1p_difference(f, s, p, quad_order)
    lhs = measure_error(f, s, p, quad_order)
    return BoundReport("sampling_p", const, 1.0, rhs).with_lhs(lhs)


def rkhs_norm(f: TestFunction, params, quad_order: int = _quad.DEFAULT_ORDER) -> float:
    return math.sqrt(max(rkhs_inner_product(params, f, f, quad_order), 0.0))


def check_superconvergence_bound(f: TestFunction, params: KernelParams, nodes, theta: float = 1.0,
                                 interpolant=None, quad_order: int = _quad.DEFAULT_ORDER) -> BoundReport:
    """L2 error of the kernel interpolant against (1/(sqrt(2) beta)) h ||f||_H.

    Only theta = 1 has a computable norm. The constant uses 1/beta for the
    embedding |f|_{W^1_2} <= c ||f||_H; for beta > 1 the smallest valid c is
    beta**-0.5, so the bound is then tighter than what the embedding proves.
    """
    if theta != 1:
        raise UnsupportedSpaceError("only theta = 1 has a computable norm (the native-space norm)")
    if isinstance(params, KernelModel):
        params = params.params
    ns = as_nodeset(nodes)
    s = interpolant if interpolant is not None else interpolate(f, ns, KernelModel.general(params))
    const = 1.0 / (math.sqrt(2.0) * params.beta)
    rhs = const * ns.h * rkhs_norm(f, params, quad_order)
    lhs = measure_error(f, s, 2.0, quad_order)
    return BoundReport("superconv_theta1", const, 1.0, rhs).with_lhs(lhs)


def satisfies_green_bc(f: TestFunction, params: KernelParams, tol: float = 1e-10) -> bool:
    """Both Robin conditions beta u'(0) = a0 u(0) + a2 u(1), beta u'(1) = -a1 u(1) - a2 u(0)."""
    if f.d1 is None:
        raise MissingDerivativeError(f"{f.id!r} has no first derivative")
    if isinstance(params, KernelModel):
        params = params.params
    a0, a1, a2, b = params.alpha0, params.alpha1, params.alpha2, params.beta
    u0, u1 = f(0.0), f(1.0)
    with np.errstate(all="ignore"):
        du0, du1 = float(f.d1(np.array(0.0))), float(f.d1(np.array(1.0)))
    left = abs(b * du0 - a0 * u0 - a2 * u1)
    right = abs(b * du1 + a1 * u1 + a2 * u0)
    return bool(left <= tol and right <= tol)

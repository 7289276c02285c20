"""Registry of analytic test functions on [0, 1].

Each entry carries its derivatives (where they exist as functions), the points
where it or its derivatives fail to be smooth, and smoothness-class
memberships. Memberships with fractional order are metadata only; the rate
harness reads the order to predict convergence exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import _quad
from .errors import MissingDerivativeError, UnsupportedSpaceError
from .kernel_core import KernelModel, KernelParams, evaluate_kernel, kernel_slopes

INF = math.inf

# Default breakpoint of the hat entry. Irrational, and its fractional cell
# position frac(n * y) stays near 1/3 or 2/3 for n = 2**k up to 512, so the
# uniform-node error constant does not drift between refinement levels.
HAT_BREAKPOINT = 3.0 * math.sqrt(5.0) / 14.0


# ----------------------------------------------------------------------------
# smoothness spaces
# ----------------------------------------------------------------------------


def _check_p(p, name="p"):
    if not (1.0 <= p <= INF):
        raise UnsupportedSpaceError(f"{name} must lie in [1, inf], got {p!r}")


@dataclass(frozen=True)
class Holder:
    """C^{s, alpha}(0, 1)."""

    s: int
    alpha: float

    def __post_init__(self):
        if int(self.s) != self.s or self.s < 0:
            raise UnsupportedSpaceError(f"Holder order s must be a nonnegative integer, got {self.s!r}")
        if not 0.0 < self.alpha <= 1.0:
            raise UnsupportedSpaceError(f"Holder exponent must lie in (0, 1], got {self.alpha!r}")


@dataclass(frozen=True)
class Sobolev:
    """W^sigma_p(0, 1); sigma may be fractional (metadata only)."""

    p: float
    sigma: float

    def __post_init__(self):
        _check_p(self.p)
        if not self.sigma > 0:
            raise UnsupportedSpaceError(f"Sobolev order must be > 0, got {self.sigma!r}")


@dataclass(frozen=True)
class Besov:
    """B^sigma_{p,q}(0, 1). Build through :func:`besov` to get the p == q collapse."""

    p: float
    q: float
    sigma: float

    def __post_init__(self):
        _check_p(self.p)
        _check_p(self.q, "q")


SmoothnessSpace = Union[Holder, Sobolev, Besov]


def besov(p: float, q: float, sigma: float) -> SmoothnessSpace:
    if p == q:
        return Sobolev(p, sigma)
    return Besov(p, q, sigma)


@dataclass(frozen=True)
class Membership:
    """f lies in ``space``; ``seminorm`` is the known top-order seminorm, if any.

    ``open`` names a parameter ("sigma", "p" or "alpha") whose stated value is
    a supremum that is NOT attained: f is in the space for every smaller value
    of that parameter but not at it.
    """

    space: SmoothnessSpace
    seminorm: Optional[float] = None
    open: Optional[str] = None
    note: str = ""


def _le(a, b, strict):
    return a < b if strict else a <= b


def _contains(m: Membership, space: SmoothnessSpace) -> bool:
    held = m.space
    if isinstance(held, Sobolev) and isinstance(space, Sobolev):
        return _le(space.sigma, held.sigma, m.open == "sigma") and _le(space.p, held.p, m.open == "p")
    if isinstance(held, Holder) and isinstance(space, Holder):
        if space.s < held.s:
            return True
        return space.s == held.s and _le(space.alpha, held.alpha, m.open == "alpha")
    if isinstance(held, Besov) and isinstance(space, Besov):
        return (
            space.p <= held.p
            and space.q >= held.q
            and _le(space.sigma, held.sigma, m.open == "sigma")
        )
    return False


# ----------------------------------------------------------------------------
# test functions
# ----------------------------------------------------------------------------

Fn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TestFunction:
    """A vectorised function on [0, 1] with optional first and second derivatives."""

    __test__ = False  # keep pytest from collecting this class

    id: str
    eval: Fn
    d1: Optional[Fn] = None
    d2: Optional[Fn] = None
    singular_points: tuple = ()
    memberships: tuple = ()
    notes: str = ""
    integral: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "singular_points", tuple(sorted(float(s) for s in self.singular_points)))
        object.__setattr__(self, "memberships", tuple(self.memberships))
        for m in self.memberships:
            if m.seminorm is not None and m.seminorm < 0:
                raise ValueError(f"{self.id}: negative seminorm in {m!r}")

    def __call__(self, x):
        out = self.eval(np.asarray(x, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, order: int) -> Fn:
        if order == 0:
            return self.eval
        fn = {1: self.d1, 2: self.d2}.get(order)
        if fn is None:
            raise MissingDerivativeError(f"{self.id!r} has no derivative of order {order}")
        return fn

    def belongs_to(self, space: SmoothnessSpace) -> bool:
        if isinstance(space, Besov) and space.p == space.q:
            space = Sobolev(space.p, space.sigma)
        return any(_contains(m, space) for m in self.memberships)

    def membership(self, space: SmoothnessSpace) -> Optional[Membership]:
        """The membership entry stated for exactly this space, if any."""
        for m in self.memberships:
            if m.space == space:
                return m
        return None

    def exact_integral(self, order: int = _quad.DEFAULT_ORDER) -> float:
        if self.integral is not None:
            return self.integral
        return _quad.integrate(self.eval, singular=self.singular_points, order=order)


def _const(c):
    return lambda x: np.full_like(np.asarray(x, dtype=float), c)


def affine(a: float = 0.25, b: float = 1.5) -> TestFunction:
    a, b = float(a), float(b)
    ms = (
        Membership(Sobolev(INF, 1), abs(b)),
        Membership(Sobolev(INF, 2), 0.0),
        Membership(Holder(0, 1.0), abs(b)),
        Membership(Holder(1, 1.0), 0.0),
    )
    return TestFunction(
        f"affine:{a!r},{b!r}",
        lambda x: a + b * x,
        _const(b),
        _const(0.0),
        memberships=ms,
        notes="a + b x",
        integral=a + 0.5 * b,
    )


def quadratic() -> TestFunction:
    ms = (
        Membership(Sobolev(INF, 2), 2.0),
        Membership(Sobolev(2, 2), 2.0),
        Membership(Sobolev(INF, 1), 2.0),
        Membership(Holder(1, 1.0), 2.0),
        Membership(Holder(0, 1.0), 2.0),
    )
    return TestFunction(
        "quadratic", lambda x: x * x, lambda x: 2.0 * x, _const(2.0), memberships=ms, notes="x^2", integral=1.0 / 3.0
    )


def sin_pi() -> TestFunction:
    pi = math.pi
    ms = (
        Membership(Sobolev(INF, 2), pi**2),
        Membership(Sobolev(2, 2), pi**2 / math.sqrt(2.0)),
        Membership(Sobolev(INF, 1), pi),
        Membership(Sobolev(2, 1), pi / math.sqrt(2.0)),
        Membership(Holder(1, 1.0), pi**2),
        Membership(Holder(0, 1.0), pi),
    )
    return TestFunction(
        "sin_pi",
        lambda x: np.sin(pi * x),
        lambda x: pi * np.cos(pi * x),
        lambda x: -(pi**2) * np.sin(pi * x),
        memberships=ms,
        notes="sin(pi x); vanishes at both ends",
        integral=2.0 / pi,
    )


def abs_pow(gamma: float) -> TestFunction:
    """|x - 1/2|**gamma for gamma in (0, 1)."""
    g = float(gamma)
    if not 0.0 < g < 1.0:
        raise ValueError(f"abs_pow needs gamma in (0, 1), got {g!r}")

    def d1(x):
        t = np.asarray(x, dtype=float) - 0.5
        with np.errstate(divide="ignore", invalid="ignore"):
            return g * np.sign(t) * np.abs(t) ** (g - 1.0)

    def d2(x):
        t = np.abs(np.asarray(x, dtype=float) - 0.5)
        with np.errstate(divide="ignore"):
            return g * (g - 1.0) * t ** (g - 2.0)

    ms = (
        # |t|^g - |s|^g <= |t - s|^g, with equality at s = 0
        Membership(Holder(0, g), 1.0),
        Membership(Sobolev(2, g + 0.5), open="sigma", note="|t|^g in W^s_2 iff s < g + 1/2"),
        Membership(Sobolev(1.0 / (1.0 - g), 1), open="p", note="|t|^(g-1) in L_p iff p < 1/(1-g)"),
    )
    return TestFunction(
        f"abs_pow:{g!r}",
        lambda x: np.abs(np.asarray(x, dtype=float) - 0.5) ** g,
        d1,
        d2,
        singular_points=(0.5,),
        memberships=ms,
        notes="cusp at 1/2",
        integral=2.0 * 0.5 ** (g + 1.0) / (g + 1.0),
    )


def power(gamma: float) -> TestFunction:
    """x**gamma for gamma in (0, 2), gamma != 1."""
    g = float(gamma)
    if not (0.0 < g < 2.0) or g == 1.0:
        raise ValueError(f"pow needs gamma in (0, 1) or (1, 2), got {g!r}")

    def ev(x):
        return np.asarray(x, dtype=float) ** g

    def d1(x):
        with np.errstate(divide="ignore"):
            return g * np.asarray(x, dtype=float) ** (g - 1.0)

    def d2(x):
        with np.errstate(divide="ignore"):
            return g * (g - 1.0) * np.asarray(x, dtype=float) ** (g - 2.0)

    if g < 1.0:
        ms = (
            Membership(Holder(0, g), 1.0),
            Membership(Sobolev(2, g + 0.5), open="sigma", note="x^g in W^s_2 iff s < g + 1/2"),
            Membership(Sobolev(1.0 / (1.0 - g), 1), open="p", note="x^(g-1) in L_p iff p < 1/(1-g)"),
        )
    else:
        ms = (
            Membership(Holder(1, g - 1.0), g),
            Membership(Holder(0, 1.0), g),
            Membership(Sobolev(INF, 1), g),
            Membership(Sobolev(2, g + 0.5), open="sigma", note="x^g in W^s_2 iff s < g + 1/2"),
            Membership(Sobolev(1.0 / (2.0 - g), 2), open="p", note="x^(g-2) in L_p iff p < 1/(2-g)"),
        )
    return TestFunction(
        f"pow:{g!r}", ev, d1, d2, singular_points=(0.0,), memberships=ms, notes="singular at 0", integral=1.0 / (g + 1.0)
    )


def bc_quadratic_coefficients(alpha0, alpha1, alpha2, beta) -> tuple[float, float, float]:
    """(c0, c1, c2) with c2 = 1 such that u = c0 + c1 x + c2 x^2 meets

    beta u'(0) = alpha0 u(0) + alpha2 u(1)  and  beta u'(1) = -alpha1 u(1) - alpha2 u(0).
    """
    a0, a1, a2, b = (float(v) for v in (alpha0, alpha1, alpha2, beta))
    mat = np.array([[a0 + a2, a2 - b], [a1 + a2, a1 + b]])
    rhs = np.array([-a2, -(2.0 * b + a1)])
    det = np.linalg.det(mat)
    if abs(det) < 1e-14:
        raise ValueError("boundary conditions are degenerate for these weights (delta = 0)")
    c0, c1 = np.linalg.solve(mat, rhs)
    return float(c0), float(c1), 1.0


def bc_quadratic(alpha0=1.0, alpha1=1.0, alpha2=0.0, beta=1.0) -> TestFunction:
    if isinstance(alpha0, KernelParams):
        p = alpha0
        alpha0, alpha1, alpha2, beta = p.alpha0, p.alpha1, p.alpha2, p.beta
    c0, c1, c2 = bc_quadratic_coefficients(alpha0, alpha1, alpha2, beta)
    lip = max(abs(c1), abs(c1 + 2.0 * c2))
    ms = (
        Membership(Sobolev(INF, 2), 2.0),
        Membership(Sobolev(2, 2), 2.0),
        Membership(Sobolev(INF, 1), lip),
        Membership(Holder(1, 1.0), 2.0),
        Membership(Holder(0, 1.0), lip),
    )
    return TestFunction(
        f"bc_quadratic:{float(alpha0)!r},{float(alpha1)!r},{float(alpha2)!r},{float(beta)!r}",
        lambda x: c0 + x * (c1 + c2 * x),
        lambda x: c1 + 2.0 * c2 * x,
        _const(2.0 * c2),
        memberships=ms,
        notes=f"{c0!r} + {c1!r} x + x^2; satisfies the Robin conditions of its weights",
        integral=c0 + 0.5 * c1 + c2 / 3.0,
    )


def hat(y: float = HAT_BREAKPOINT) -> TestFunction:
    """Piecewise linear bump: 0 at both ends, 1 at ``y``."""
    y = float(y)
    if not 0.0 < y < 1.0:
        raise ValueError(f"hat breakpoint must lie in (0, 1), got {y!r}")
    up, down = 1.0 / y, -1.0 / (1.0 - y)

    def ev(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= y, x * up, (1.0 - x) / (1.0 - y))

    def d1(x):
        return np.where(np.asarray(x, dtype=float) < y, up, down)

    lip = max(up, -down)
    ms = (
        Membership(Holder(0, 1.0), lip),
        Membership(Sobolev(INF, 1), lip),
        Membership(Sobolev(2, 1.5), open="sigma", note="a kink is in W^s_2 iff s < 3/2"),
    )
    return TestFunction(
        f"hat:{y!r}", ev, d1, None, singular_points=(y,), memberships=ms, notes="kink, no second derivative", integral=0.5
    )


def kernel_translate(m: KernelModel, x: float) -> TestFunction:
    """K(., x) as a test function (kink at x)."""
    x = float(x)
    left, right = kernel_slopes(m, x)
    lip = max(abs(left), abs(right))
    ms = (
        Membership(Holder(0, 1.0), lip),
        Membership(Sobolev(INF, 1), lip),
        Membership(Sobolev(2, 1.5), open="sigma"),
    )
    return TestFunction(
        f"K[{m.kind.value}]({x!r})",
        lambda y: evaluate_kernel(m, np.asarray(y, dtype=float), x),
        lambda y: np.where(np.asarray(y, dtype=float) < x, left, right),
        None,
        singular_points=(x,),
        memberships=ms,
        notes="kernel translate",
    )


_FACTORIES = {
    "affine": affine,
    "quadratic": quadratic,
    "sin_pi": sin_pi,
    "abs_pow": abs_pow,
    "pow": power,
    "bc_quadratic": bc_quadratic,
    "hat": hat,
}


def builtin_bank() -> list[TestFunction]:
    return [
        affine(),
        quadratic(),
        sin_pi(),
        abs_pow(0.6),
        abs_pow(0.75),
        power(0.75),
        power(1.25),
        bc_quadratic(1.0, 1.0, 0.0, 1.0),
        hat(),
    ]


def get_function(spec: str) -> TestFunction:
    """Resolve ids such as ``sin_pi``, ``pow:0.75`` or ``affine:1,2``."""
    name, _, args = spec.partition(":")
    name = name.strip()
    if name not in _FACTORIES:
        raise KeyError(f"unknown function {name!r}; known: {', '.join(sorted(_FACTORIES))}")
    if name in ("abs_pow", "pow") and not args:
        raise ValueError(f"{name} needs an exponent, e.g. {name}:0.75")
    vals = [float(a) for a in args.split(",") if a.strip()] if args else []
    return _FACTORIES[name](*vals)


# ----------------------------------------------------------------------------
# seminorms
# ----------------------------------------------------------------------------

SUP_SAMPLES = 10_000
SUP_NEIGHBOURHOOD = 1e-3
SUP_NEIGHBOURHOOD_SAMPLES = 201
HOLDER_GRID = 500


def sup_sample_points(singular: Sequence[float] = (), extra: Sequence[float] = ()) -> np.ndarray:
    """Dense grid on [0, 1] plus 201 points within +/-1e-3 of each singular point."""
    pts = [np.linspace(0.0, 1.0, SUP_SAMPLES), np.asarray(extra, dtype=float)]
    for s in singular:
        pts.append(np.linspace(s - SUP_NEIGHBOURHOOD, s + SUP_NEIGHBOURHOOD, SUP_NEIGHBOURHOOD_SAMPLES))
    x = np.concatenate(pts)
    return np.unique(x[(x >= 0.0) & (x <= 1.0)])


def lp_norm(fn: Fn, p: float, singular: Sequence[float] = (), points: Sequence[float] = (),
            quad_order: int = _quad.DEFAULT_ORDER) -> float:
    """||fn||_{L_p(0,1)} by panelled Gauss-Legendre, or dense sampling for p = inf."""
    _check_p(p)
    if p == INF:
        x = sup_sample_points(singular, points)
        with np.errstate(invalid="ignore"):
            vals = np.abs(fn(x))
        # a non-finite sample means the sup is infinite (e.g. |t|^(g-1) at t = 0)
        if not np.all(np.isfinite(vals)):
            return INF
        return float(np.max(vals))
    val = _quad.integrate(lambda x: np.abs(fn(x)) ** p, points=points, singular=singular, order=quad_order)
    return float(val ** (1.0 / p))


def _holder_quotient_sup(fn: Fn, alpha: float) -> float:
    x = np.linspace(0.0, 1.0, HOLDER_GRID)
    v = fn(x)
    dx = np.abs(x[:, None] - x[None, :])
    dv = np.abs(v[:, None] - v[None, :])
    mask = dx > 0
    return float(np.max(dv[mask] / dx[mask] ** alpha))


def seminorm(f: TestFunction, space: SmoothnessSpace, quad_order: int = _quad.DEFAULT_ORDER) -> float:
    """Top-order seminorm of ``f`` in an integer-order Sobolev space or a Holder space.

    Sobolev: ||f^(s)||_{L_p} for s in {1, 2}. Holder: the stated metadata when
    present; for alpha = 1 with the next derivative available, the sup norm of
    that derivative (equal to the Lipschitz constant); otherwise the sup of the
    difference quotient on a 500 x 500 grid, which can only underestimate.
    """
    if isinstance(space, Sobolev):
        if space.sigma not in (1, 2):
            raise UnsupportedSpaceError(f"fractional order {space.sigma!r} is metadata only")
        fn = f.derivative(int(space.sigma))
        return lp_norm(fn, space.p, f.singular_points, quad_order=quad_order)
    if isinstance(space, Holder):
        stated = f.membership(space)
        if stated is not None and stated.seminorm is not None:
            return stated.seminorm
        return holder_seminorm_estimate(f.derivative(space.s), space.alpha,
                                        f.derivative(space.s + 1) if _has(f, space.s + 1) else None,
                                        f.singular_points)
    raise UnsupportedSpaceError(f"no seminorm for {space!r}")


def _has(f: TestFunction, order: int) -> bool:
    return order == 0 or {1: f.d1, 2: f.d2}.get(order) is not None


def holder_seminorm_estimate(fn: Fn, alpha: float, dfn: Optional[Fn] = None, singular: Sequence[float] = ()) -> float:
    if alpha == 1.0 and dfn is not None:
        return lp_norm(dfn, INF, singular)
    return _holder_quotient_sup(fn, alpha)

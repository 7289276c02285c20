"""The 2-piecewise-linear kernel family on [0, 1].

A kernel is 2-piecewise linear when every translate ``K(., x)`` is affine on
``[0, x]`` and on ``[x, 1]``. The general member is the reproducing kernel of
W^1_2(0, 1) under the inner product

    <f, g> = a0 f(0)g(0) + a1 f(1)g(1) + a2 [f(0)g(1) + f(1)g(0)] + beta <f', g'>_{L2}

and the remaining kinds are its closed-form limits (Dirichlet-constrained
subspaces) plus the triangular Wendland-type kernel.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _quad
from .errors import DomainError, InvalidKernelError, MissingDerivativeError, UnsupportedKindError

LEFT = "left_endpoint"
RIGHT = "right_endpoint"


@dataclass(frozen=True)
class KernelParams:
    """Weights (alpha0, alpha1, alpha2, beta) of the boundary-plus-gradient inner product.

    Construction does not validate; use :func:`validate_params` or build a
    :class:`KernelModel`, which refuses invalid weights.
    """

    alpha0: float
    alpha1: float
    alpha2: float
    beta: float

    @property
    def determinant(self) -> float:
        return self.alpha0 * self.alpha1 - self.alpha2**2

    @property
    def trace(self) -> float:
        return self.alpha0 + self.alpha1

    @property
    def delta(self) -> float:
        a0, a1, a2, b = self.alpha0, self.alpha1, self.alpha2, self.beta
        return a0 * a1 - a2**2 + b * (a0 + a1 + 2.0 * a2)


class ValidityReport(NamedTuple):
    ok: bool
    violations: tuple[str, ...]


def validate_params(p: KernelParams) -> ValidityReport:
    """Check beta > 0 and positive-definiteness of [[a0, a2], [a2, a1]]."""
    bad = []
    if not p.beta > 0:
        bad.append(f"beta: beta = {p.beta!r} must be > 0")
    if not p.determinant > 0:
        bad.append(f"determinant: alpha0*alpha1 - alpha2^2 = {p.determinant!r} must be > 0")
    if not p.trace > 0:
        bad.append(f"trace: alpha0 + alpha1 = {p.trace!r} must be > 0")
    # implied by the three above; kept as a guard against round-off in the inputs
    if not bad and not p.delta > 0:
        bad.append(f"delta: {p.delta!r} must be > 0")
    return ValidityReport(not bad, tuple(bad))


class Kind(str, enum.Enum):
    GENERAL = "general"
    RELEASED_BM = "released-bm"
    RELEASED_REVERSE_BM = "released-reverse-bm"
    BM = "bm"
    REVERSE_BM = "reverse-bm"
    BRIDGE = "brownian-bridge"
    WENDLAND = "wendland"


ROBIN_KINDS = frozenset({Kind.GENERAL, Kind.RELEASED_BM, Kind.RELEASED_REVERSE_BM})

_FORCED_ZEROS = {
    Kind.BM: frozenset({LEFT}),
    Kind.REVERSE_BM: frozenset({RIGHT}),
    Kind.BRIDGE: frozenset({LEFT, RIGHT}),
}


@dataclass(frozen=True)
class KernelModel:
    """One member of the kernel family.

    Prefer the classmethod constructors; they only take the parameters that
    are meaningful for the kind. Unused slots stay at 0.
    """

    kind: Kind
    alpha0: float = 0.0
    alpha1: float = 0.0
    alpha2: float = 0.0
    beta: float = 1.0
    epsilon: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        bad = []
        if self.kind is Kind.GENERAL:
            bad.extend(validate_params(self.params).violations)
        elif self.kind is Kind.WENDLAND:
            if not 0.0 < self.epsilon <= 1.0:
                bad.append(f"epsilon: {self.epsilon!r} must lie in (0, 1]")
            else:
                object.__setattr__(self, "beta", 1.0 / (2.0 * self.epsilon))
        else:
            if not self.beta > 0:
                bad.append(f"beta: beta = {self.beta!r} must be > 0")
            if self.kind is Kind.RELEASED_BM and not self.alpha0 > 0:
                bad.append(f"alpha0: {self.alpha0!r} must be > 0")
            if self.kind is Kind.RELEASED_REVERSE_BM and not self.alpha1 > 0:
                bad.append(f"alpha1: {self.alpha1!r} must be > 0")
        if bad:
            raise InvalidKernelError(bad, self.kind.value)

    @classmethod
    def general(cls, alpha0, alpha1=None, alpha2=None, beta=None) -> "KernelModel":
        if isinstance(alpha0, KernelParams):
            p = alpha0
            return cls(Kind.GENERAL, p.alpha0, p.alpha1, p.alpha2, p.beta)
        return cls(Kind.GENERAL, float(alpha0), float(alpha1), float(alpha2), float(beta))

    @classmethod
    def released_brownian(cls, alpha0: float, beta: float) -> "KernelModel":
        return cls(Kind.RELEASED_BM, alpha0=float(alpha0), beta=float(beta))

    @classmethod
    def released_reverse_brownian(cls, alpha1: float, beta: float) -> "KernelModel":
        return cls(Kind.RELEASED_REVERSE_BM, alpha1=float(alpha1), beta=float(beta))

    @classmethod
    def brownian_motion(cls, beta: float = 1.0) -> "KernelModel":
        return cls(Kind.BM, beta=float(beta))

    @classmethod
    def reverse_brownian_motion(cls, beta: float = 1.0) -> "KernelModel":
        return cls(Kind.REVERSE_BM, beta=float(beta))

    @classmethod
    def brownian_bridge(cls, beta: float = 1.0) -> "KernelModel":
        return cls(Kind.BRIDGE, beta=float(beta))

    @classmethod
    def wendland(cls, epsilon: float) -> "KernelModel":
        return cls(Kind.WENDLAND, epsilon=float(epsilon))

    @property
    def params(self) -> KernelParams:
        """Inner-product weights; for the limit kinds the missing weights are zero.

        For ``wendland`` only ``beta`` is meaningful: it is the effective
        gradient weight 1/(2 epsilon) fixed by the slope jump at the kink.
        """
        return KernelParams(self.alpha0, self.alpha1, self.alpha2, self.beta)

    @property
    def forced_zeros(self) -> frozenset:
        return _FORCED_ZEROS.get(self.kind, frozenset())

    @property
    def has_inner_product(self) -> bool:
        return self.kind is not Kind.WENDLAND

    def __call__(self, x, y):
        return evaluate_kernel(self, x, y)


def _check_closed(*arrays):
    for a in arrays:
        a = np.asarray(a, dtype=float)
        bad = a[~((a >= 0.0) & (a <= 1.0))]
        if bad.size:
            raise DomainError(f"kernel arguments must lie in [0, 1], got {float(bad.flat[0])!r}")


def _check_open(x):
    x = float(x)
    if not 0.0 < x < 1.0:
        raise DomainError(f"slope/Green checks need x in (0, 1), got {x!r}")
    return x


def evaluate_kernel(m: KernelModel, x, y):
    """K(x, y) from the closed form of the model's kind; broadcasts over arrays."""
    _check_closed(x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    b = m.beta
    kind = m.kind
    if kind is Kind.GENERAL:
        a0, a1, a2 = m.alpha0, m.alpha1, m.alpha2
        num = (
            a1 * b
            + b * b
            - hi * ((a1 + a2) * b)
            + lo * (a0 * a1 + a0 * b - a2 * a2 + a2 * b)
            + (lo * hi) * (a2 * a2 - a0 * a1)
        )
        out = num / (b * m.params.delta)
    elif kind is Kind.RELEASED_BM:
        out = 1.0 / m.alpha0 + lo / b
    elif kind is Kind.RELEASED_REVERSE_BM:
        out = 1.0 / m.alpha1 + (1.0 - hi) / b
    elif kind is Kind.BM:
        out = lo / b
    elif kind is Kind.REVERSE_BM:
        out = (1.0 - hi) / b
    elif kind is Kind.BRIDGE:
        out = (lo - lo * hi) / b
    else:
        out = np.maximum(0.0, 1.0 - m.epsilon * (hi - lo))
    if out.ndim == 0:
        return float(out)
    return out


def kernel_slopes(m: KernelModel, x: float) -> tuple[float, float]:
    """Constant slopes of y -> K(x, y) on [0, x) and (x, 1]."""
    return one_sided_slopes(m, _check_open(x))


def one_sided_slopes(m: KernelModel, x: float) -> tuple[float, float]:
    """Closed-form slopes of y -> K(x, y) left and right of x, for any x in [0, 1].

    At x = 0 (x = 1) only the right (left) slope describes the translate.
    """
    x = float(x)
    b = m.beta
    kind = m.kind
    if kind is Kind.GENERAL:
        a0, a1, a2 = m.alpha0, m.alpha1, m.alpha2
        scale = b * m.params.delta
        cross = x * (a2 * a2 - a0 * a1)
        left = (a0 * a1 + a0 * b - a2 * a2 + a2 * b + cross) / scale
        right = (-(a1 + a2) * b + cross) / scale
        return left, right
    if kind in (Kind.RELEASED_BM, Kind.BM):
        return 1.0 / b, 0.0
    if kind in (Kind.RELEASED_REVERSE_BM, Kind.REVERSE_BM):
        return 0.0, -1.0 / b
    if kind is Kind.BRIDGE:
        return (1.0 - x) / b, -x / b
    return m.epsilon, -m.epsilon


def green_jump_residual(m: KernelModel, x: float) -> float:
    """beta * (slope_left - slope_right) - 1; vanishes for every kind."""
    left, right = kernel_slopes(m, x)
    return m.beta * (left - right) - 1.0


def green_bc_residuals(m: KernelModel, x: float) -> tuple[float, float]:
    """Residuals of the two Robin boundary conditions for u = K(., x).

    Defined for the general and released kinds (the latter are general
    weights with alpha1 = alpha2 = 0 or alpha0 = alpha2 = 0). The Dirichlet
    kinds satisfy zero boundary values instead (see :func:`forced_zero_residual`).
    """
    if m.kind not in ROBIN_KINDS:
        raise UnsupportedKindError(
            f"the {m.kind.value!r} kind has no Robin boundary conditions; check its forced zeros instead"
        )
    left, right = kernel_slopes(m, x)
    k0 = evaluate_kernel(m, x, 0.0)
    k1 = evaluate_kernel(m, x, 1.0)
    r_left = m.beta * left - m.alpha0 * k0 - m.alpha2 * k1
    r_right = m.beta * right + m.alpha1 * k1 + m.alpha2 * k0
    return r_left, r_right


def forced_zero_residual(m: KernelModel, x: float) -> float:
    """max |K(x, e)| over the model's forced zeros e (0.0 when there are none)."""
    ends = [e for e, name in ((0.0, LEFT), (1.0, RIGHT)) if name in m.forced_zeros]
    if not ends:
        return 0.0
    return max(abs(evaluate_kernel(m, x, e)) for e in ends)


def rkhs_inner_product(p, f, g, quad_order: int = _quad.DEFAULT_ORDER) -> float:
    """Boundary terms plus beta * int f'g', with panels split at both functions' singular points.

    ``p`` is a :class:`KernelParams` or a :class:`KernelModel` with an inner
    product. ``f`` and ``g`` are test functions carrying ``d1``.
    """
    if isinstance(p, KernelModel):
        if not p.has_inner_product:
            raise UnsupportedKindError("the wendland kind is exposed without an inner product")
        p = p.params
    if quad_order < 2:
        raise ValueError("quad_order must be >= 2")
    for fn in (f, g):
        if getattr(fn, "d1", None) is None:
            raise MissingDerivativeError(f"{getattr(fn, 'id', fn)!r} has no first derivative")
    f0, f1, g0, g1 = f(0.0), f(1.0), g(0.0), g(1.0)
    boundary = p.alpha0 * f0 * g0 + p.alpha1 * f1 * g1 + p.alpha2 * (f0 * g1 + f1 * g0)
    sing = sorted(set(f.singular_points) | set(g.singular_points))
    grad = _quad.integrate(lambda t: f.d1(t) * g.d1(t), singular=sing, order=quad_order)
    return float(boundary + p.beta * grad)

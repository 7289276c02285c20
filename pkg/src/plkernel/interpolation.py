"""Kernel interpolants, linear splines, and the check that they coincide.

For a 2-piecewise-linear kernel every translate is affine between consecutive
nodes, so the kernel interpolant is a continuous piecewise affine function
through the data. With 0 and 1 among the nodes it is therefore the linear
spline; :func:`equivalence_gap` measures how far the two computed objects are
apart.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DomainError, MissingEndpointError, NodeSetError, SingularGramError
from .kernel_core import LEFT, RIGHT, KernelModel, evaluate_kernel, one_sided_slopes

PIVOT_RTOL = 1e-12
PROJECT_RTOL = 1e-12


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class NodeSet:
    """Strictly increasing points in [0, 1]."""

    nodes: np.ndarray

    def __post_init__(self):
        x = np.array(self.nodes, dtype=float).ravel()
        if x.size == 0:
            raise NodeSetError("a node set needs at least one node")
        if not np.all(np.isfinite(x)) or x[0] < 0.0 or x[-1] > 1.0 or np.any((x < 0) | (x > 1)):
            raise NodeSetError(f"nodes must lie in [0, 1], got {x!r}")
        d = np.diff(x)
        if np.any(d == 0):
            raise NodeSetError(f"duplicate nodes at {x[1:][d == 0]!r}")
        if np.any(d < 0):
            raise NodeSetError("nodes must be strictly increasing")
        object.__setattr__(self, "nodes", _frozen(x))

    @classmethod
    def uniform(cls, n: int) -> "NodeSet":
        """x_i = i / n, i = 0..n."""
        if n < 1:
            raise NodeSetError(f"uniform node sets need n >= 1, got {n}")
        return cls(np.arange(n + 1) / n)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, rho: float = 3.0) -> "NodeSet":
        """n panels with endpoints; every gap ratio max/min is at most ``rho``.

        Gaps are drawn i.i.d. uniform on [1, rho] and normalised, so the ratio
        bound holds by construction and no rejection loop is needed.
        """
        if n < 1:
            raise NodeSetError(f"random node sets need n >= 1, got {n}")
        if rho < 1:
            raise ValueError(f"quasi-uniformity ratio must be >= 1, got {rho!r}")
        gaps = rng.uniform(1.0, rho, size=n)
        x = np.concatenate([[0.0], np.cumsum(gaps) / gaps.sum()])
        x[-1] = 1.0
        return cls(x)

    def __len__(self) -> int:
        return self.nodes.size

    def __iter__(self):
        return iter(self.nodes.tolist())

    def __repr__(self) -> str:
        return f"NodeSet({self.nodes.tolist()!r})"

    @property
    def n(self) -> int:
        """Number of panels when both endpoints are present (len - 1)."""
        return self.nodes.size - 1

    @property
    def has_endpoints(self) -> bool:
        return self.nodes[0] == 0.0 and self.nodes[-1] == 1.0

    @property
    def gaps(self) -> np.ndarray:
        """Consecutive gaps, padded with the distance to a missing endpoint."""
        x = self.nodes
        parts = []
        if x[0] != 0.0:
            parts.append([x[0]])
        parts.append(np.diff(x))
        if x[-1] != 1.0:
            parts.append([1.0 - x[-1]])
        return np.concatenate(parts)

    @property
    def h(self) -> float:
        """Fill distance: the largest gap, boundary gaps included when an endpoint is absent."""
        return float(np.max(self.gaps))

    @property
    def quasi_uniformity(self) -> float:
        g = self.gaps
        return float(g.max() / g.min())

    def is_uniform(self, rtol: float = 1e-12) -> bool:
        return self.has_endpoints and np.allclose(self.nodes, np.arange(self.n + 1) / self.n, rtol=0, atol=rtol)

    def require_endpoints(self, what: str = "this operation"):
        if not self.has_endpoints:
            raise MissingEndpointError(f"{what} needs both 0 and 1 among the nodes")


def as_nodeset(nodes) -> NodeSet:
    return nodes if isinstance(nodes, NodeSet) else NodeSet(nodes)


def gram_matrix(m: KernelModel, nodes) -> np.ndarray:
    x = as_nodeset(nodes).nodes
    K = evaluate_kernel(m, x[:, None], x[None, :])
    # the closed forms are symmetric already; this pins it bit-for-bit
    return np.triu(K) + np.triu(K, 1).T


def _forced_zero(m: KernelModel, x: float) -> bool:
    return (x == 0.0 and LEFT in m.forced_zeros) or (x == 1.0 and RIGHT in m.forced_zeros)


def pivoted_ldl(K: np.ndarray, rtol: float = PIVOT_RTOL):
    """Diagonally pivoted LDL^T of a symmetric PSD matrix: K[perm][:, perm] = L diag(d) L^T.

    Raises a bare :class:`SingularGramError` (index into ``K``) when the
    largest remaining pivot drops below ``rtol`` times the largest diagonal.
    The caller relabels it with node information.
    """
    A = np.array(K, dtype=float)
    n = A.shape[0]
    perm = np.arange(n)
    L = np.eye(n)
    d = np.zeros(n)
    scale = float(np.max(np.abs(np.diag(A)))) if n else 0.0
    for k in range(n):
        j = k + int(np.argmax(np.diag(A)[k:]))
        if j != k:
            A[[k, j], :] = A[[j, k], :]
            A[:, [k, j]] = A[:, [j, k]]
            perm[[k, j]] = perm[[j, k]]
            L[[k, j], :k] = L[[j, k], :k]
        piv = A[k, k]
        if not piv > rtol * scale:
            err = SingularGramError(int(perm[k]), float("nan"), float(piv))
            err.remaining = perm[k:].copy()
            raise err
        d[k] = piv
        col = A[k + 1:, k] / piv
        L[k + 1:, k] = col
        A[k + 1:, k + 1:] -= piv * np.outer(col, col)
    return L, d, perm


def _ldl_solve(L, d, perm, b):
    y = solve_triangular(L, b[perm], lower=True, unit_diagonal=True)
    z = solve_triangular(L.T, y / d, lower=False, unit_diagonal=True)
    out = np.empty_like(z)
    out[perm] = z
    return out


@dataclass(frozen=True, eq=False)
class KernelInterpolant:
    """s = sum_i c_i K(., x_i)."""

    model: KernelModel
    nodes: NodeSet
    coefficients: np.ndarray
    values: np.ndarray = field(default=None)

    def __call__(self, x):
        return eval_kernel_interpolant(self, x)

    @property
    def breakpoints(self) -> np.ndarray:
        return self.nodes.nodes

    def d1(self, x):
        """Derivative away from the nodes (one-sided slope from the right at a node)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for xi, ci in zip(self.nodes.nodes, self.coefficients):
            left, right = one_sided_slopes(self.model, xi)
            out = out + ci * np.where(x < xi, left, right)
        return out


def solve_coefficients(m: KernelModel, nodes, fvals: Sequence[float], mode: str = "solve") -> KernelInterpolant:
    """Coefficients of the kernel interpolant.

    ``mode="solve"`` factorises the Gram matrix and raises
    :class:`SingularGramError` on a vanishing pivot. ``mode="project"`` opts into
    the least-squares (pseudo-inverse) solution, dropping eigenvalues below
    1e-12 times the largest; it is meant for the Dirichlet kinds.
    """
    ns = as_nodeset(nodes)
    f = np.asarray(fvals, dtype=float).ravel()
    if f.size != len(ns):
        raise ValueError(f"{f.size} values for {len(ns)} nodes")
    K = gram_matrix(m, ns)
    if mode == "project":
        w, V = np.linalg.eigh(K)
        keep = w > PROJECT_RTOL * max(w.max(), 0.0)
        c = V[:, keep] @ ((V[:, keep].T @ f) / w[keep])
    elif mode == "solve":
        try:
            L, d, perm = pivoted_ldl(K)
        except SingularGramError as err:
            raise _relabel(err, m, ns, f) from None
        c = _ldl_solve(L, d, perm, f)
        # one step of iterative refinement
        c = c + _ldl_solve(L, d, perm, f - K @ c)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return KernelInterpolant(m, ns, _frozen(c), _frozen(f))


def _relabel(err: SingularGramError, m: KernelModel, ns: NodeSet, f: np.ndarray) -> SingularGramError:
    idx = int(err.index)
    hint = None
    for j in err.remaining:
        x = float(ns.nodes[j])
        if _forced_zero(m, x):
            idx = int(j)
            if f[j] != 0.0:
                hint = (
                    f"node x={x!r} is a forced zero of the {m.kind.value} kernel but the data there is "
                    f"{float(f[j])!r}; every interpolant in this space vanishes at that endpoint"
                )
            else:
                hint = f"node x={x!r} is a forced zero of the {m.kind.value} kernel; drop it from the node set"
            break
    return SingularGramError(idx, float(ns.nodes[idx]), err.pivot, hint)


def eval_kernel_interpolant(s: KernelInterpolant, x):
    xa = np.asarray(x, dtype=float)
    if np.any(~((xa >= 0.0) & (xa <= 1.0))):
        raise DomainError(f"evaluation points must lie in [0, 1], got {x!r}")
    flat = xa.ravel()
    K = evaluate_kernel(s.model, s.nodes.nodes[:, None], flat[None, :])
    out = (s.coefficients @ K).reshape(xa.shape)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class PiecewiseLinearInterpolant:
    """Chord interpolant through (x_i, values[i]); nodes include 0 and 1."""

    nodes: NodeSet
    values: np.ndarray

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        if np.any(~((xa >= 0.0) & (xa <= 1.0))):
            raise DomainError(f"evaluation points must lie in [0, 1], got {x!r}")
        xs, fs = self.nodes.nodes, self.values
        flat = xa.ravel()
        i = np.clip(np.searchsorted(xs, flat, side="right"), 1, xs.size - 1)
        x0, x1 = xs[i - 1], xs[i]
        f0, f1 = fs[i - 1], fs[i]
        out = f0 + (f1 - f0) / (x1 - x0) * (flat - x0)
        # node hits return the stored value, no chord arithmetic
        j = np.searchsorted(xs, flat)
        j = np.minimum(j, xs.size - 1)
        hit = xs[j] == flat
        out[hit] = fs[j[hit]]
        out = out.reshape(xa.shape)
        return float(out) if out.ndim == 0 else out

    @property
    def breakpoints(self) -> np.ndarray:
        return self.nodes.nodes

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.nodes.nodes)

    def d1(self, x):
        xs = self.nodes.nodes
        flat = np.asarray(x, dtype=float)
        i = np.clip(np.searchsorted(xs, flat, side="right"), 1, xs.size - 1)
        return self.slopes[i - 1]

    def integral(self) -> float:
        return float(np.sum(0.5 * (self.values[1:] + self.values[:-1]) * np.diff(self.nodes.nodes)))


def piecewise_linear(nodes, fvals: Sequence[float]) -> PiecewiseLinearInterpolant:
    ns = as_nodeset(nodes)
    ns.require_endpoints("piecewise linear interpolation")
    f = np.asarray(fvals, dtype=float).ravel()
    if f.size != len(ns):
        raise ValueError(f"{f.size} values for {len(ns)} nodes")
    if len(ns) < 2:
        raise MissingEndpointError("piecewise linear interpolation needs both 0 and 1 among the nodes")
    return PiecewiseLinearInterpolant(ns, _frozen(f))


def equivalence_gap(m: KernelModel, nodes, fvals: Sequence[float], probe_count: int = 1000) -> float:
    """max |P_n f - L_n f| over ``probe_count`` equispaced points of [0, 1]."""
    if m.forced_zeros:
        raise ValueError(f"the {m.kind.value} kernel forces zeros at {sorted(m.forced_zeros)}; use a released kind")
    ns = as_nodeset(nodes)
    ns.require_endpoints("the equivalence check")
    kern = solve_coefficients(m, ns, fvals)
    spline = piecewise_linear(ns, fvals)
    probes = np.linspace(0.0, 1.0, probe_count)
    return float(np.max(np.abs(kern(probes) - spline(probes))))

"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class PLKError(Exception):
    """Base class for package errors."""


class DomainError(PLKError, ValueError):
    """An evaluation point lies outside [0, 1] (or outside (0, 1) where required)."""


class InvalidKernelError(PLKError, ValueError):
    """Kernel parameters violate the validity conditions of their kind."""

    def __init__(self, violations, kind="general"):
        self.violations = list(violations)
        self.kind = kind
        super().__init__(f"invalid {kind} kernel: " + "; ".join(self.violations))


class UnsupportedKindError(PLKError, ValueError):
    """The operation is not defined for this kernel kind."""


class NodeSetError(PLKError, ValueError):
    """Nodes are not strictly increasing, contain duplicates or leave [0, 1]."""


class MissingEndpointError(NodeSetError):
    """The operation needs both 0 and 1 among the nodes."""


class NonUniformNodesError(NodeSetError):
    """The operation needs x_i = i/n."""


class SingularGramError(PLKError, ArithmeticError):
    """A pivot of the Gram factorization fell below the singularity threshold.

    ``index`` is the position (in the node set) of the node whose pivot failed;
    ``hint`` is set when that node is a forced zero of the kernel and the data
    there is nonzero, i.e. the data is not in the native space.
    """

    def __init__(self, index: int, node: float, pivot: float, hint: str | None = None):
        self.index = index
        self.node = node
        self.pivot = pivot
        self.hint = hint
        msg = f"singular Gram matrix: pivot {pivot:.3e} at node index {index} (x={node!r})"
        if hint:
            msg += f"; {hint}"
        super().__init__(msg)


class MissingDerivativeError(PLKError, ValueError):
    """A test function lacks a derivative the operation needs."""


class UnsupportedSpaceError(PLKError, ValueError):
    """Smoothness parameters outside what an operation can handle."""


class DegenerateFitError(PLKError, ValueError):
    """Too few rows above the error floor to fit a convergence slope."""

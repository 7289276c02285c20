import math

import numpy as np
from hypothesis import strategies as st

from plkernel.kernel_core import KernelModel, KernelParams


def random_params(rng: np.random.Generator) -> KernelParams:
    a0, a1 = rng.uniform(0.1, 5.0, size=2)
    a2 = rng.uniform(-0.95, 0.95) * math.sqrt(a0 * a1)
    return KernelParams(float(a0), float(a1), float(a2), float(rng.uniform(0.1, 5.0)))


def random_model(rng: np.random.Generator) -> KernelModel:
    """A valid model without forced zeros: general or one of the released kinds."""
    which = rng.integers(3)
    if which == 0:
        return KernelModel.general(random_params(rng))
    if which == 1:
        return KernelModel.released_brownian(rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0))
    return KernelModel.released_reverse_brownian(rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0))


def random_nodes_with_endpoints(rng: np.random.Generator, count: int) -> np.ndarray:
    inner = np.sort(rng.uniform(0.0, 1.0, size=count - 2))
    return np.unique(np.concatenate([[0.0], inner, [1.0]]))


@st.composite
def valid_params(draw):
    a0 = draw(st.floats(0.05, 10.0))
    a1 = draw(st.floats(0.05, 10.0))
    t = draw(st.floats(-0.95, 0.95))
    beta = draw(st.floats(0.05, 10.0))
    return KernelParams(a0, a1, t * math.sqrt(a0 * a1), beta)


@st.composite
def any_model(draw):
    kind = draw(st.sampled_from(["general", "rbm", "rrbm", "bm", "rev", "bridge", "wendland"]))
    beta = draw(st.floats(0.05, 10.0))
    if kind == "general":
        return KernelModel.general(draw(valid_params()))
    if kind == "rbm":
        return KernelModel.released_brownian(draw(st.floats(0.05, 10.0)), beta)
    if kind == "rrbm":
        return KernelModel.released_reverse_brownian(draw(st.floats(0.05, 10.0)), beta)
    if kind == "bm":
        return KernelModel.brownian_motion(beta)
    if kind == "rev":
        return KernelModel.reverse_brownian_motion(beta)
    if kind == "bridge":
        return KernelModel.brownian_bridge(beta)
    return KernelModel.wendland(draw(st.floats(0.01, 1.0)))


unit = st.floats(0.0, 1.0)
interior = st.floats(1e-6, 1.0 - 1e-6)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import any_model, interior, random_params, unit, valid_params
from plkernel.errors import DomainError, InvalidKernelError, MissingDerivativeError, UnsupportedKindError
from plkernel.function_bank import affine, hat, kernel_translate
from plkernel.kernel_core import (
    LEFT,
    RIGHT,
    KernelModel,
    KernelParams,
    Kind,
    evaluate_kernel,
    forced_zero_residual,
    green_bc_residuals,
    green_jump_residual,
    kernel_slopes,
    rkhs_inner_product,
    validate_params,
)


# --- validation -------------------------------------------------------------


def test_identity_weights_are_valid():
    rep = validate_params(KernelParams(1, 1, 0, 1))
    assert rep.ok
    assert rep.violations == ()


@pytest.mark.parametrize("params", [KernelParams(1, 1, 1, 1), KernelParams(1, 0, 0, 1)])
def test_zero_determinant_is_reported(params):
    rep = validate_params(params)
    assert not rep.ok
    assert [v.split(":")[0] for v in rep.violations] == ["determinant"]


def test_every_violation_is_listed():
    rep = validate_params(KernelParams(-1, -1, 0, -2))
    names = {v.split(":")[0] for v in rep.violations}
    assert names == {"beta", "trace"}
    rep = validate_params(KernelParams(-1, 0, 0.5, 0))
    assert {v.split(":")[0] for v in rep.violations} == {"beta", "determinant", "trace"}


def test_general_model_rejects_invalid_weights():
    with pytest.raises(InvalidKernelError, match="determinant"):
        KernelModel.general(1, 1, 1, 1)
    with pytest.raises(InvalidKernelError, match="beta"):
        KernelModel.general(1, 1, 0, 0)


def test_delta_positive_for_valid_weights():
    rng = np.random.default_rng(0)
    for _ in range(100):
        p = random_params(rng)
        assert validate_params(p).ok
        assert p.delta > 0


@pytest.mark.parametrize("eps", [0.0, -0.5, 1.5])
def test_wendland_epsilon_range(eps):
    with pytest.raises(InvalidKernelError):
        KernelModel.wendland(eps)


def test_limit_kind_parameters_must_be_positive():
    with pytest.raises(InvalidKernelError):
        KernelModel.released_brownian(0.0, 1.0)
    with pytest.raises(InvalidKernelError):
        KernelModel.brownian_bridge(-1.0)


def test_forced_zeros_per_kind():
    assert KernelModel.brownian_motion(1).forced_zeros == {LEFT}
    assert KernelModel.reverse_brownian_motion(1).forced_zeros == {RIGHT}
    assert KernelModel.brownian_bridge(1).forced_zeros == {LEFT, RIGHT}
    for m in (KernelModel.general(1, 1, 0, 1), KernelModel.released_brownian(1, 1),
              KernelModel.released_reverse_brownian(1, 1), KernelModel.wendland(0.5)):
        assert m.forced_zeros == frozenset()


# --- evaluation -------------------------------------------------------------


def test_released_brownian_value():
    m = KernelModel.released_brownian(alpha0=1, beta=1)
    assert evaluate_kernel(m, 0.3, 0.7) == pytest.approx(1.3, abs=1e-15)


def test_bridge_value():
    assert evaluate_kernel(KernelModel.brownian_bridge(1), 0.5, 0.5) == 0.25


@pytest.mark.parametrize(
    "model, x, y, expected",
    [
        (KernelModel.brownian_motion(2.0), 0.3, 0.8, 0.15),
        (KernelModel.reverse_brownian_motion(2.0), 0.3, 0.8, 0.1),
        (KernelModel.released_reverse_brownian(2.0, 1.0), 0.3, 0.8, 0.5 + 0.2),
        (KernelModel.wendland(0.5), 0.2, 0.9, 1 - 0.35),
        (KernelModel.brownian_bridge(0.5), 0.2, 0.6, (0.2 - 0.12) / 0.5),
    ],
)
def test_closed_forms(model, x, y, expected):
    assert evaluate_kernel(model, x, y) == pytest.approx(expected, rel=1e-14)


def test_general_matches_two_branch_formula():
    # x <= y branch written out by hand, divided by beta * delta
    a0, a1, a2, b = 2.0, 1.0, -0.5, 0.7
    m = KernelModel.general(a0, a1, a2, b)
    delta = a0 * a1 - a2**2 + b * (a0 + a1 + 2 * a2)

    def k(x, y):
        lo, hi = min(x, y), max(x, y)
        num = (a1 * b + b * b - hi * (a1 + a2) * b + lo * (a0 * a1 + a0 * b - a2**2 + a2 * b)
               + lo * hi * (a2**2 - a0 * a1))
        return num / (b * delta)

    for x, y in [(0.1, 0.9), (0.5, 0.5), (0.8, 0.2), (0.0, 1.0)]:
        assert evaluate_kernel(m, x, y) == pytest.approx(k(x, y), rel=1e-14)


def test_released_kind_is_general_limit():
    # alpha1, alpha2 -> 0 in the general kernel recovers 1/alpha0 + min/beta
    m = KernelModel.general(1.0, 1e-9, 0.0, 1.0)
    ref = KernelModel.released_brownian(1.0, 1.0)
    for x, y in [(0.3, 0.7), (0.9, 0.1)]:
        assert evaluate_kernel(m, x, y) == pytest.approx(evaluate_kernel(ref, x, y), rel=1e-7)


def test_vectorised_evaluation():
    m = KernelModel.general(1, 1, 0, 1)
    x = np.linspace(0, 1, 7)
    got = evaluate_kernel(m, x[:, None], x[None, :])
    assert got.shape == (7, 7)
    np.testing.assert_allclose(got[2, 5], evaluate_kernel(m, x[2], x[5]))
    assert m(0.2, 0.4) == evaluate_kernel(m, 0.2, 0.4)


@pytest.mark.parametrize("x, y", [(1.5, 0.3), (0.3, -0.1), (np.nan, 0.5)])
def test_domain_errors(x, y):
    with pytest.raises(DomainError):
        evaluate_kernel(KernelModel.brownian_motion(1), x, y)


@settings(max_examples=200, deadline=None)
@given(any_model(), unit, unit)
def test_symmetry(m, x, y):
    assert abs(evaluate_kernel(m, x, y) - evaluate_kernel(m, y, x)) <= 1e-15 * max(1.0, abs(evaluate_kernel(m, x, y)))


@settings(max_examples=100, deadline=None)
@given(any_model(), interior, st.lists(unit, min_size=3, max_size=3, unique=True))
def test_translate_is_affine_on_each_side(m, x, ts):
    for lo, hi in ((0.0, x), (x, 1.0)):
        y = np.sort(lo + (hi - lo) * np.asarray(ts))
        k = np.array([evaluate_kernel(m, x, v) for v in y])
        if y[2] - y[0] < 1e-9:
            continue
        pred = k[0] + (k[2] - k[0]) * (y[1] - y[0]) / (y[2] - y[0])
        assert abs(pred - k[1]) <= 1e-12 * max(1.0, np.abs(k).max())


@settings(max_examples=100, deadline=None)
@given(any_model(), st.lists(unit, min_size=1, max_size=8, unique=True))
def test_gram_is_positive_semidefinite(m, pts):
    x = np.asarray(pts)
    K = evaluate_kernel(m, x[:, None], x[None, :])
    lam = np.linalg.eigvalsh(K)
    assert lam.min() >= -1e-10 * max(1.0, np.abs(K).max())


# --- slopes and Green properties ---------------------------------------------


@pytest.mark.parametrize(
    "model, x, expected",
    [
        (KernelModel.brownian_motion(1), 0.4, (1.0, 0.0)),
        (KernelModel.brownian_bridge(1), 0.5, (0.5, -0.5)),
        (KernelModel.reverse_brownian_motion(2), 0.3, (0.0, -0.5)),
        (KernelModel.wendland(0.25), 0.6, (0.25, -0.25)),
    ],
)
def test_slopes(model, x, expected):
    np.testing.assert_allclose(kernel_slopes(model, x), expected, rtol=1e-15, atol=1e-15)


@settings(max_examples=100, deadline=None)
@given(any_model(), interior)
def test_slopes_match_difference_quotients(m, x):
    left, right = kernel_slopes(m, x)
    if x > 1e-3:
        h = 0.5 * x
        assert (evaluate_kernel(m, x, x) - evaluate_kernel(m, x, x - h)) / h == pytest.approx(left, rel=1e-7, abs=1e-7)
    if x < 1 - 1e-3:
        h = 0.5 * (1 - x)
        assert (evaluate_kernel(m, x, x + h) - evaluate_kernel(m, x, x)) / h == pytest.approx(right, rel=1e-7, abs=1e-7)


@pytest.mark.parametrize("x", [0.0, 1.0])
def test_slopes_need_interior_point(x):
    with pytest.raises(DomainError):
        kernel_slopes(KernelModel.brownian_motion(1), x)


@pytest.mark.parametrize("beta", [1.0, 2.0])
def test_jump_for_brownian_motion(beta):
    assert green_jump_residual(KernelModel.brownian_motion(beta), 0.4) == 0.0


@settings(max_examples=200, deadline=None)
@given(any_model(), interior)
def test_jump_vanishes_for_every_kind(m, x):
    assert abs(green_jump_residual(m, x)) < 1e-12


@settings(max_examples=200, deadline=None)
@given(valid_params(), interior)
def test_boundary_conditions_for_general_weights(p, x):
    m = KernelModel.general(p)
    r_left, r_right = green_bc_residuals(m, x)
    assert abs(r_left) < 1e-10
    assert abs(r_right) < 1e-10


@pytest.mark.parametrize(
    "params, x, tol",
    [((1, 1, 0, 1), 0.5, 1e-12), ((2, 1, -0.5, 0.7), 0.25, 1e-10)],
)
def test_boundary_condition_examples(params, x, tol):
    r = green_bc_residuals(KernelModel.general(*params), x)
    np.testing.assert_allclose(r, (0.0, 0.0), atol=tol)


def test_boundary_condition_sweep():
    m = KernelModel.general(1, 1, 0, 1)
    for x in np.random.default_rng(4).uniform(0, 1, 50):
        assert max(abs(v) for v in green_bc_residuals(m, x)) < 1e-10


def test_released_kinds_meet_their_robin_conditions():
    for m in (KernelModel.released_brownian(0.7, 1.3), KernelModel.released_reverse_brownian(2.0, 0.4)):
        np.testing.assert_allclose(green_bc_residuals(m, 0.35), (0, 0), atol=1e-14)


@pytest.mark.parametrize(
    "model",
    [KernelModel.brownian_motion(1), KernelModel.reverse_brownian_motion(1),
     KernelModel.brownian_bridge(1), KernelModel.wendland(0.5)],
)
def test_boundary_conditions_unsupported_for_other_kinds(model):
    with pytest.raises(UnsupportedKindError):
        green_bc_residuals(model, 0.5)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 10.0), unit)
def test_dirichlet_kinds_vanish_at_forced_zeros(beta, x):
    for m in (KernelModel.brownian_motion(beta), KernelModel.reverse_brownian_motion(beta),
              KernelModel.brownian_bridge(beta)):
        assert forced_zero_residual(m, x) < 1e-14


def test_forced_zero_residual_zero_without_constraints():
    assert forced_zero_residual(KernelModel.general(1, 1, 0, 1), 0.3) == 0.0


# --- inner product ------------------------------------------------------------


def test_inner_product_of_constants():
    p = KernelParams(2.0, 1.5, -0.5, 0.3)
    one = affine(1.0, 0.0)
    assert rkhs_inner_product(p, one, one) == pytest.approx(2.0 + 1.5 - 1.0, rel=1e-14)


def test_inner_product_of_identity():
    x = affine(0.0, 1.0)
    assert rkhs_inner_product(KernelParams(1, 1, 0, 1), x, x) == pytest.approx(2.0, rel=1e-14)


@pytest.mark.parametrize("x", [0.1, 0.5, 0.93])
def test_constant_reproduced_by_translate(x):
    p = KernelParams(2.0, 1.0, -0.5, 0.7)
    k = kernel_translate(KernelModel.general(p), x)
    assert rkhs_inner_product(p, affine(1.0, 0.0), k) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(valid_params(), interior, st.floats(0.05, 0.95), st.floats(-3, 3), st.floats(-3, 3))
def test_reproducing_property(p, x, y, a, b):
    m = KernelModel.general(p)
    k = kernel_translate(m, x)
    for f in (affine(a, b), hat(y)):
        assert rkhs_inner_product(p, f, k) == pytest.approx(f(x), abs=1e-10)


def test_reproducing_property_for_released_kind():
    m = KernelModel.released_brownian(0.5, 2.0)
    f = hat(0.3)
    for x in (0.2, 0.6):
        assert rkhs_inner_product(m, f, kernel_translate(m, x)) == pytest.approx(f(x), abs=1e-12)


def test_inner_product_needs_derivative():
    p = KernelParams(1, 1, 0, 1)
    with pytest.raises(MissingDerivativeError):
        rkhs_inner_product(p, affine(), lambda t: t)


def test_wendland_has_no_inner_product():
    m = KernelModel.wendland(0.5)
    assert m.kind is Kind.WENDLAND
    assert m.beta == pytest.approx(1.0)
    with pytest.raises(UnsupportedKindError):
        rkhs_inner_product(m, affine(), affine())


def test_model_is_immutable():
    m = KernelModel.general(1, 1, 0, 1)
    with pytest.raises(AttributeError):
        m.beta = 2.0
    assert math.isfinite(m.params.delta)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vsqn.core import RngStream
from vsqn.harness.checks import fd_check
from vsqn.problems import quad_make
from vsqn.smoothing import (
    CompositeProxFunction,
    IndicatorFunction,
    L1Function,
    ProxSpec,
    ProxSolverError,
    SmoothedView,
    check_smoothing_chain,
    eta_schedule_diminishing,
    huber_l1,
    indicator_smooth,
    lse_smooth_max,
    moreau_value_grad,
    norm2_smooth,
    prox_soft_threshold,
)

TWO_TERM_A = np.array([[1.0, 0.0], [0.0, 1.0]])


# --- soft threshold ----------------------------------------------------------

def test_soft_threshold_componentwise():
    out = prox_soft_threshold(np.array([3.0, -0.5]), 1.0)
    assert np.allclose(out, [2.0, 0.0])


def test_soft_threshold_zero_is_identity():
    x = np.array([0.3, -2.0, 1.5])
    assert np.array_equal(prox_soft_threshold(x, 0.0), x)


def test_soft_threshold_dominating():
    assert prox_soft_threshold(np.array([-2.0]), 5.0)[0] == 0.0


def test_soft_threshold_matches_grid_minimization():
    # scalar prox of lam|u| at x: argmin lam|u| + (u-x)^2/2
    x, lam = 1.7, 0.6
    grid = np.linspace(-4, 4, 160001)
    best = grid[np.argmin(lam * np.abs(grid) + 0.5 * (grid - x) ** 2)]
    assert abs(prox_soft_threshold(np.array([x]), lam)[0] - best) < 1e-4


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=1, max_size=6),
       st.floats(0, 10))
def test_soft_threshold_shrinks(values, threshold):
    x = np.array(values)
    out = prox_soft_threshold(x, threshold)
    assert np.all(np.abs(out) <= np.abs(x) + 1e-12)
    assert np.all(np.sign(out) * np.sign(x) >= 0)


# --- Moreau envelope ---------------------------------------------------------

def test_moreau_l1_at_origin():
    value, grad = moreau_value_grad(L1Function(1.0), np.zeros(1), 1.0)
    assert value == 0.0
    assert grad[0] == 0.0


def test_moreau_l1_scalar_closed_form():
    # prox of |.| at x=2, eta=1 soft-thresholds to 1
    value, grad = moreau_value_grad(L1Function(1.0), np.array([2.0]), 1.0)
    assert value == pytest.approx(1.5)
    assert grad[0] == pytest.approx(1.0)
    # cross-check by direct grid minimization of |u| + (u-2)^2/2
    grid = np.linspace(-3, 3, 240001)
    assert min(np.abs(grid) + 0.5 * (grid - 2.0) ** 2) == pytest.approx(1.5, abs=1e-8)


def test_moreau_indicator_inside_set():
    box = IndicatorFunction(lambda x: np.clip(x, -1.0, 1.0))
    value, grad = moreau_value_grad(box, np.array([0.5]), 0.7)
    assert value == 0.0
    assert grad[0] == 0.0


def test_moreau_optimality_condition_l1():
    # x - u* must lie in eta * subdifferential of lam|.| at u*
    f = L1Function(0.8)
    eta = 0.5
    x = np.array([2.0, -0.1, 0.3, -4.0])
    u = f.prox(x, eta)
    r = (x - u) / eta
    for ui, ri in zip(u, r):
        if ui != 0:
            assert ri == pytest.approx(0.8 * np.sign(ui))
        else:
            assert abs(ri) <= 0.8 + 1e-12


def test_moreau_requires_positive_eta():
    with pytest.raises(ValueError):
        moreau_value_grad(L1Function(1.0), np.zeros(2), 0.0)


def test_inner_prox_solver_matches_closed_form():
    # smooth part zero: composite prox must reduce to the l1 prox
    zero = lambda u: 0.0
    zero_grad = lambda u: np.zeros_like(u)
    f = CompositeProxFunction(L1Function(1.0), zero, zero_grad,
                              lipschitz_L=1.0, tau=0.0)
    x = np.array([2.0, -0.3, 0.9])
    u = f.prox(x, 1.0)
    assert np.allclose(u, prox_soft_threshold(x, 1.0), atol=1e-9)


def test_inner_prox_solver_budget_error():
    quad = quad_make(6, 50.0, "SC", RngStream(0, 1), noise_half_width=0.0)
    f = CompositeProxFunction(
        L1Function(1.0), quad.true_value, quad.true_gradient,
        lipschitz_L=quad.meta.lipschitz_L, tau=quad.meta.tau,
        spec=ProxSpec(tolerance=1e-14, max_inner_iters=3),
    )
    with pytest.raises(ProxSolverError) as info:
        f.prox(np.full(6, 5.0), 0.5)
    assert info.value.residual > 0


def test_moreau_fixed_eta_preserves_minimizer():
    # for l1 + strongly convex quadratic, minimizing the envelope must give
    # the same point as minimizing the original composite
    quad = quad_make(5, 8.0, "SC", RngStream(21, 1), noise_half_width=0.0)
    lam = 0.4
    comp = CompositeProxFunction(
        L1Function(lam), quad.true_value, quad.true_gradient,
        lipschitz_L=quad.meta.lipschitz_L, tau=quad.meta.tau,
    )
    # proximal gradient on the composite to high precision
    L = quad.meta.lipschitz_L
    x = np.zeros(5)
    for _ in range(60000):
        x = prox_soft_threshold(x - quad.true_gradient(x) / L, lam / L)
    # gradient descent on the envelope (1/eta-smooth)
    eta = 0.2
    y = np.zeros(5)
    for _ in range(8000):
        _, g = moreau_value_grad(comp, y, eta)
        y = y - eta * g
    assert np.linalg.norm(x - y) < 1e-8


# --- log-sum-exp max ---------------------------------------------------------

def test_lse_symmetric_zero():
    value, grad = lse_smooth_max(TWO_TERM_A, np.zeros(2), np.zeros(2), 1.0)
    assert value == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(grad, [0.5, 0.5])


def test_lse_sharp_limit():
    A = np.array([[1.0, 0.0], [0.0, 1.0]])
    x = np.array([10.0, 0.0])
    value, grad = lse_smooth_max(A, np.zeros(2), x, 0.01)
    exact = 10.0 + 0.01 * math.log((1.0 + math.exp(-1000.0)) / 2.0)
    assert value == pytest.approx(exact, abs=1e-12)
    assert np.allclose(grad, A[0], atol=1e-12)


def test_lse_overflow_safe():
    value, grad = lse_smooth_max(TWO_TERM_A, np.zeros(2),
                                 np.array([1e6, -1e6]), 1e-4)
    assert np.isfinite(value) and np.all(np.isfinite(grad))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=2, max_size=2),
       st.floats(0.01, 5.0))
def test_lse_sandwich(z, eta):
    x = np.array(z)
    value, _ = lse_smooth_max(TWO_TERM_A, np.zeros(2), x, eta)
    top = max(z)
    assert top - eta * math.log(2) - 1e-9 <= value <= top + 1e-9


def test_lse_needs_two_terms():
    with pytest.raises(ValueError):
        lse_smooth_max(np.array([[1.0, 0.0]]), np.zeros(1), np.zeros(2), 1.0)


# --- Huber and norm smoothing ------------------------------------------------

def test_huber_zero():
    value, grad = huber_l1(np.zeros(3), 1.0)
    assert value == 0.0
    assert np.all(grad == 0)


def test_huber_branch_boundary_consistent():
    eta = 0.7
    value, grad = huber_l1(np.array([eta]), eta)
    assert value == pytest.approx(eta / 2)
    assert grad[0] == pytest.approx(1.0)


def test_huber_linear_branch():
    value, grad = huber_l1(np.array([3.0]), 1.0)
    assert value == pytest.approx(2.5)
    assert grad[0] == pytest.approx(1.0)


def test_norm2_zero_and_unit():
    value, grad = norm2_smooth(np.zeros(3), 1.0)
    assert value == 0.0 and np.all(grad == 0)
    x = np.array([1.0, 0.0])
    value, grad = norm2_smooth(x, 1.0)
    assert value == pytest.approx(math.sqrt(2) - 1)
    assert np.linalg.norm(grad) == pytest.approx(1 / math.sqrt(2))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-20, 20), min_size=1, max_size=5),
       st.floats(0.01, 3.0))
def test_norm2_sandwich(values, eta):
    x = np.array(values)
    value, _ = norm2_smooth(x, eta)
    norm = np.linalg.norm(x)
    assert norm - eta - 1e-9 <= value <= norm + 1e-12


# --- indicator smoothing -----------------------------------------------------

def test_indicator_smooth_inside():
    value, grad = indicator_smooth(np.array([-1.0]), lambda x: np.minimum(x, 0.0), 1.0)
    assert value == 0.0 and grad[0] == 0.0


def test_indicator_smooth_halfline():
    value, grad = indicator_smooth(np.array([3.0]), lambda x: np.minimum(x, 0.0), 1.0)
    assert value == pytest.approx(4.5)
    assert grad[0] == pytest.approx(3.0)


def test_indicator_smooth_fd():
    project = lambda x: np.minimum(x, 0.0)
    gen = np.random.default_rng(0)
    points = [gen.uniform(0.5, 3.0, size=3) for _ in range(20)]
    report = fd_check(lambda x: indicator_smooth(x, project, 0.7), points)
    assert report.passed, report


# --- schedules and chain inequality ------------------------------------------

def test_eta_diminishing_values():
    assert eta_schedule_diminishing(1, 2.0, 0) == pytest.approx(1.0)
    v6 = eta_schedule_diminishing(1, 2.0, 6)
    assert v6 == pytest.approx((8.0 / 32.0) ** (1 / 3))


def test_eta_diminishing_monotone():
    values = [eta_schedule_diminishing(4, 1.5, k) for k in range(40)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_chain_norm2_zero_violations():
    gen = np.random.default_rng(1)
    points = [gen.standard_normal(4) * 3 for _ in range(1000)]
    report = check_smoothing_chain(
        (lambda x: norm2_smooth(x, 1.0)[0], lambda x: norm2_smooth(x, 0.5)[0]),
        1.0, 0.5, B=1.0, points=points)
    assert report.passed and report.points_checked == 1000


def test_chain_lse_zero_violations():
    gen = np.random.default_rng(2)
    points = [gen.standard_normal(2) * 5 for _ in range(1000)]
    pair = (lambda x: lse_smooth_max(TWO_TERM_A, np.zeros(2), x, 1.0)[0],
            lambda x: lse_smooth_max(TWO_TERM_A, np.zeros(2), x, 0.5)[0])
    report = check_smoothing_chain(pair, 1.0, 0.5, B=1.0, points=points)
    assert report.passed


def test_chain_equal_levels_trivially_pass():
    gen = np.random.default_rng(3)
    points = [gen.standard_normal(3) for _ in range(50)]
    pair = (lambda x: norm2_smooth(x, 0.8)[0], lambda x: norm2_smooth(x, 0.8)[0])
    report = check_smoothing_chain(pair, 0.8, 0.8, B=1.0, points=points)
    assert report.passed


def test_chain_rejects_increasing_levels():
    with pytest.raises(ValueError):
        check_smoothing_chain((None, None), 0.5, 1.0, 1.0, [])


# --- smoothed views ----------------------------------------------------------

@pytest.mark.parametrize("view,original", [
    (SmoothedView.norm2(0.3), lambda x: np.linalg.norm(x)),
    (SmoothedView.huber(0.3, 4), lambda x: np.sum(np.abs(x))),
    (SmoothedView.lse(TWO_TERM_A, np.zeros(2), 0.3), lambda x: max(x[0], x[1])),
])
def test_view_sandwich_and_gradient(view, original):
    gen = np.random.default_rng(7)
    dim = 2 if view.beta == math.log(2) else 4
    for _ in range(200):
        x = gen.standard_normal(dim) * 2
        v = view.value(x)
        f = original(x)
        assert v <= f + 1e-12
        assert f <= v + view.eta * view.beta + 1e-12
    points = [gen.standard_normal(dim) * 2 + 0.31 for _ in range(25)]
    report = fd_check(lambda x: (view.value(x), view.gradient(x)), points)
    assert report.passed, report


def test_view_gradient_lipschitz_certificate():
    view = SmoothedView.norm2(0.25)
    gen = np.random.default_rng(9)
    bound = view.grad_lipschitz
    for _ in range(300):
        x, y = gen.standard_normal(3), gen.standard_normal(3)
        lhs = np.linalg.norm(view.gradient(x) - view.gradient(y))
        assert lhs <= bound * np.linalg.norm(x - y) + 1e-12

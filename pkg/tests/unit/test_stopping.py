import math

import numpy as np
import pytest

from errors import NoBracket, WindowViolation
from models.scale import ScaleEvaluator
from pricing.cds import cds_value, payoff_G, payoff_G_extended, payoff_G_prime
from pricing.stopping import (
    boundary_f,
    boundary_f_prime,
    candidate_J,
    candidate_J_dh,
    f_r_of_b,
    f_r_prime,
    gamma_window,
    optimality_scan,
    second_order_condition,
    solve_h_star,
    suboptimal_levels,
    total_value,
    value_function,
    value_function_extended,
    value_function_prime,
)
from schemas.contract import SwitchTerms

pytestmark = pytest.mark.stopping

LEVEL = math.log(5.0)
EXPECTED_H_STAR = {0.0: 1.1476, 0.2: 0.5590}
EXPECTED_PAYOFF_AT_H_STAR = {0.0: 0.5621, 0.2: 0.5107}
EXPECTED_WINDOW = {0.0: (-4.1667, -0.01037), 0.2: (-5.0, -0.28818)}


def test_boundary_reproduces_reference_levels(model, solution):
    """
    Test h* = 1.1476 for sigma = 0 and h* = 0.5590 for sigma = 0.2.
    """
    assert solution.h_star == pytest.approx(EXPECTED_H_STAR[model.sigma], abs=1e-3), "h* mismatch"
    assert 0.0 < solution.h_star < LEVEL, "h* must lie inside (0, b)"
    assert solution.f_at_0 > 0.0 > solution.f_at_b, "f must change sign from + to -"
    assert abs(solution.f_at_h_star) <= 1e-9, "boundary equation residual too large"


def test_gamma_window(model, evaluator, switch, solution):
    """
    Test the window of admissible switching costs.
    """
    lower, upper = gamma_window(evaluator, switch.alpha_tilde, LEVEL)
    expected_lower, expected_upper = EXPECTED_WINDOW[model.sigma]
    assert lower == pytest.approx(expected_lower, abs=1e-4), "lower window bound"
    assert upper == pytest.approx(expected_upper, abs=1e-5), "upper window bound"
    assert solution.gamma_window == (lower, upper), "solution must report the window"


def test_pasting_at_the_boundary(solution):
    """
    Test continuous and smooth pasting at h* for both path regularities.
    """
    assert solution.continuous_gap <= 1e-10, "continuous pasting gap too large"
    assert solution.pasting_gap <= 1e-8, "smooth pasting gap too large"


def test_payoff_positive_at_boundary(model, evaluator, switch, solution):
    """
    Test G_b(h*) against the reference value.
    """
    value = payoff_G(evaluator, switch, LEVEL, solution.h_star)
    assert value == pytest.approx(EXPECTED_PAYOFF_AT_H_STAR[model.sigma], abs=1e-3), "G_b(h*) mismatch"
    assert value > 0.0, "G_b(h*) must be positive"


def test_window_violation(evaluator, switch):
    """
    Test that costs outside the window are refused.
    """
    lower, upper = gamma_window(evaluator, switch.alpha_tilde, LEVEL)
    too_cheap = SwitchTerms(p_tilde=switch.p_tilde, alpha_tilde=switch.alpha_tilde, gamma=0.5 * upper)
    with pytest.raises(WindowViolation):
        solve_h_star(evaluator, too_cheap, LEVEL)
    too_dear = SwitchTerms(p_tilde=switch.p_tilde, alpha_tilde=switch.alpha_tilde, gamma=lower - 1.0)
    with pytest.raises(WindowViolation):
        solve_h_star(evaluator, too_dear, LEVEL)
    assert not issubclass(WindowViolation, NoBracket), "window and bracket failures are distinct"


def test_f_r_starts_at_zero_and_decreases(evaluator):
    """
    Test f_r(0) = 0, strict decrease on [0, 2] and the analytic slope.
    """
    levels = np.linspace(0.0, 2.0, 101)
    values = np.array([f_r_of_b(evaluator, level) for level in levels])
    assert values[0] == pytest.approx(0.0, abs=1e-12), "f_r(0) must vanish"
    assert np.all(np.diff(values) < 0.0), "f_r must decrease strictly"
    step = 1e-6
    for level in (0.5, 1.0, 1.5):
        numeric = (f_r_of_b(evaluator, level + step) - f_r_of_b(evaluator, level - step)) / (2 * step)
        assert f_r_prime(evaluator, level) == pytest.approx(numeric, rel=1e-5, abs=1e-8), f"f_r' at {level}"


def test_boundary_function_single_crossing(evaluator, switch, solution):
    """
    Test that f decreases strictly on [0, b], crosses zero once at h*, and its analytic slope.
    """
    hs = np.linspace(0.0, LEVEL, 201)
    values = np.array([boundary_f(evaluator, switch, LEVEL, h) for h in hs])
    assert np.all(np.diff(values) < 0.0), "f must decrease strictly"
    crossings = np.flatnonzero(np.diff(np.sign(values)) != 0)
    assert crossings.size == 1, "f must change sign exactly once"
    assert hs[crossings[0]] <= solution.h_star <= hs[crossings[0] + 1], "the crossing must bracket h*"
    step = 1e-6
    for h in (0.3, 0.9, 1.4):
        numeric = (boundary_f(evaluator, switch, LEVEL, h + step) - boundary_f(evaluator, switch, LEVEL, h - step)) / (
            2 * step
        )
        assert boundary_f_prime(evaluator, switch, LEVEL, h) == pytest.approx(numeric, rel=1e-5), f"f' at {h}"


def test_first_and_second_order_conditions(evaluator, switch, solution):
    """
    Test dJ_h/dh = 0 and d2J_h/dh2 < 0 at h*, and dJ_h/dh against finite differences elsewhere.
    """
    h, y = solution.h_star, LEVEL - 0.05
    assert candidate_J_dh(evaluator, switch, LEVEL, h, y) == pytest.approx(0.0, abs=1e-9), "first-order condition"
    curvature = second_order_condition(evaluator, switch, LEVEL, h, y)
    assert curvature < 0.0, "h* must be a maximum of h -> J_h(y)"
    step = 1e-4
    numeric = (
        candidate_J(evaluator, switch, LEVEL, h + step, y)
        - 2 * candidate_J(evaluator, switch, LEVEL, h, y)
        + candidate_J(evaluator, switch, LEVEL, h - step, y)
    ) / step**2
    assert curvature == pytest.approx(numeric, rel=1e-3), "second-order condition mismatch"
    for trial in (0.4 * h, 0.5 * (h + y)):
        step = 1e-6
        numeric = (
            candidate_J(evaluator, switch, LEVEL, trial + step, y) - candidate_J(evaluator, switch, LEVEL, trial - step, y)
        ) / (2 * step)
        assert candidate_J_dh(evaluator, switch, LEVEL, trial, y) == pytest.approx(numeric, rel=1e-5, abs=1e-9), \
            f"dJ/dh mismatch at h = {trial}"


def test_value_function_shape(evaluator, switch, solution):
    """
    Test V = G_b on [0, h*], V > G_b beyond, V >= 0 and continuity at h*.
    """
    ys = np.linspace(0.0, LEVEL, 201)
    value = np.asarray(value_function_extended(solution, evaluator, switch, LEVEL, ys))
    payoff = np.asarray(payoff_G_extended(evaluator, switch, LEVEL, ys))
    stop = ys <= solution.h_star
    assert np.allclose(value[stop], payoff[stop], rtol=0.0, atol=1e-12), "V must equal G_b on [0, h*]"
    assert np.all(value[~stop] - payoff[~stop] >= -1e-12), "V must dominate G_b"
    assert np.all(value >= -1e-12), "V must be non-negative"
    h = solution.h_star
    assert value_function(solution, evaluator, switch, LEVEL, h) == pytest.approx(
        payoff_G(evaluator, switch, LEVEL, h), abs=1e-12
    ), "V(h*) = G_b(h*)"
    left = value_function_prime(solution, evaluator, switch, LEVEL, h, side="left")
    right = value_function_prime(solution, evaluator, switch, LEVEL, h, side="right")
    assert left == pytest.approx(right, abs=1e-8), "one-sided derivatives must agree at h*"


def test_value_and_payoff_decrease_in_drawdown(evaluator, switch, solution):
    """
    Test V_b' <= 0 and G_b' <= 0 on [0, b], with both one-sided derivatives at h*.
    """
    for y in np.append(np.linspace(0.0, LEVEL, 101), solution.h_star):
        assert payoff_G_prime(evaluator, switch, LEVEL, y) <= 0.0, f"G_b increases at y = {y}"
        for side in ("left", "right"):
            slope = value_function_prime(solution, evaluator, switch, LEVEL, y, side=side)
            assert slope <= 0.0, f"V_b increases at y = {y} ({side})"


def test_value_after_default_is_zero(evaluator, switch, solution):
    """
    Test that the option is worthless once default has happened.
    """
    assert value_function_extended(solution, evaluator, switch, LEVEL, LEVEL + 0.5) == 0.0, "V beyond b"


def test_optimality_scan(evaluator, switch, solution):
    """
    Test J_{h*}(y) >= J_h(y) for h on a 50-point grid and y on a 50-point grid in [h, b].
    """
    margin, (h, y) = optimality_scan(solution, evaluator, switch, LEVEL)
    assert margin >= -1e-12, f"threshold h = {h} beats h* at y = {y} by {-margin:.3e}"


def test_suboptimal_thresholds_are_dominated(evaluator, switch, solution):
    """
    Test that the thresholds h* +- eps give candidate values below V.
    """
    levels = suboptimal_levels(solution, [0.05, 0.1, 0.2])
    assert levels == sorted(levels) and all(0.0 < h < LEVEL for h in levels), "levels must lie in (0, b)"
    for h in levels:
        for y in np.linspace(h, LEVEL, 11):
            j = candidate_J(evaluator, switch, LEVEL, h, y)
            v = value_function(solution, evaluator, switch, LEVEL, y)
            assert j <= v + 1e-12, f"J_{h}({y}) exceeds V"


def test_total_value(evaluator, terms, switch, solution):
    """
    Test that the switchable contract is the outright contract plus the option.
    """
    for y in (0.0, 0.8, 1.4):
        expected = cds_value(evaluator, terms, y) + value_function(solution, evaluator, switch, LEVEL, y)
        assert total_value(evaluator, terms, switch, y, solution) == pytest.approx(expected, rel=1e-14), \
            f"total value mismatch at y = {y}"
    assert total_value(evaluator, terms, switch, 0.8) == pytest.approx(
        total_value(evaluator, terms, switch, 0.8, solution), rel=1e-12
    ), "solving the boundary on demand must give the same value"

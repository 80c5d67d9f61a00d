"""
Check suites behind the verify command.

Each check produces a CheckResult; the analytic suite covers the boundary, pasting,
generator and optimality properties, the Monte Carlo suite compares every closed form
with its simulated estimate.
"""
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import integrate

from models.levy import laplace_exponent
from models.scale import ScaleEvaluator
from pricing.cds import payoff_G, payoff_G_extended
from pricing.drawdown import (
    DrawdownProblem,
    discounted_max_increase,
    exit_up_transform,
    two_sided_down,
    two_sided_up,
)
from pricing.stopping import (
    boundary_f,
    candidate_J,
    candidate_J_dh,
    f_r_of_b,
    optimality_scan,
    second_order_condition,
    total_value,
    value_function_extended,
)
from schemas.config import RunConfig
from schemas.contract import SwitchTerms
from schemas.numerics import PathConfig
from schemas.report import BoundarySolution, CheckResult, MartingaleReport
from verification.generator import generator_values_G, interior_grid, variational_check
from verification.mc_oracle import (
    dt_sensitivity,
    martingale_scan,
    simulate_drawdown_functionals,
    switch_contract_value_mc,
)

logger = logging.getLogger(__name__)

NUMERICAL_ZERO = 1e-12
Z_LIMIT = 3.0
DT_SHIFT_LIMIT = 2.0
MARTINGALE_TIMES = (0.5, 1.0, 2.0)


def _result(name: str, value: float, tolerance: float, passed: bool, detail: Optional[str] = None) -> CheckResult:
    if not passed:
        logger.warning("check %s failed: value %.3e, tolerance %.3e", name, value, tolerance)
    return CheckResult(name=name, passed=bool(passed), value=float(value), tolerance=tolerance, detail=detail)


def scale_transform_error(ev: ScaleEvaluator, lam: float) -> float:
    """
    Relative error of int_0^inf exp(-lam x) W(x) dx against 1 / (psi(lam) - u), lam > Phi(u).

    The integrand is evaluated as W_Phi(x) exp(-(lam - Phi) x), which cannot overflow.
    """
    shift = lam - ev.phi
    value, _ = integrate.quad(
        lambda x: ev.W_esscher(x) * math.exp(-shift * x), 0.0, np.inf, epsabs=0.0, epsrel=1e-11, limit=200
    )
    exact = 1.0 / (laplace_exponent(ev.model, lam) - ev.u)
    return abs(value / exact - 1.0)


def analytic_checks(
    config: RunConfig, ev: ScaleEvaluator, switch: SwitchTerms, sol: BoundarySolution
) -> Tuple[List[CheckResult], Dict[str, float]]:
    """
    Run the deterministic checks.

    :return: The check results and summary statistics of (L_Y - r) G_b on the grid.
    """
    numerics = config.numerics
    model, b, r = config.model, config.contract.b, config.contract.r
    h = sol.h_star
    checks = []

    lower, upper = sol.gamma_window
    checks.append(_result(
        "gamma_window", min(switch.gamma - lower, upper - switch.gamma), 0.0, lower < switch.gamma < upper,
        detail=f"({lower:.6g}, {upper:.6g})",
    ))

    residual = abs(sol.f_at_h_star)
    checks.append(_result("boundary_residual", residual, 1e-9, residual <= 1e-9))
    checks.append(_result(
        "continuous_pasting", sol.continuous_gap, numerics.continuous_pasting_tol,
        sol.continuous_gap <= numerics.continuous_pasting_tol,
    ))
    checks.append(_result(
        "smooth_pasting", sol.pasting_gap, numerics.smooth_pasting_tol,
        sol.pasting_gap <= numerics.smooth_pasting_tol,
    ))

    first_order = abs(candidate_J_dh(ev, switch, b, h, h))
    checks.append(_result("first_order_condition", first_order, 1e-8, first_order <= 1e-8))
    second_order = second_order_condition(ev, switch, b, h, h)
    checks.append(_result("second_order_condition", second_order, 0.0, second_order < 0.0))

    grid = interior_grid(b, numerics.grid_n)
    values = generator_values_G(model, ev, switch, b, grid, numerics.generator)
    target = r * switch.gamma
    deviation = float(np.max(np.abs(values - target)))
    checks.append(_result(
        "generator_flatness", deviation, numerics.generator_tol, deviation <= numerics.generator_tol,
        detail=f"target r * gamma = {target:.6g}",
    ))
    generator_summary = {
        "target": target,
        "min": float(values.min()),
        "max": float(values.max()),
        "mean": float(values.mean()),
    }

    report = variational_check(
        model, ev, switch, b, sol, interior_grid(b, numerics.grid_n, avoid=(h,), gap=1e-6),
        tol=numerics.generator_tol, config=numerics.generator,
    )
    checks.append(_result(
        "variational_inequality",
        max(report.stopping_max_generator, report.continuation_max_abs_generator),
        numerics.generator_tol,
        report.passed,
        detail=f"violations at {report.violations}" if report.violations else None,
    ))

    margin, (h_worst, y_worst) = optimality_scan(sol, ev, switch, b)
    checks.append(_result(
        "optimality_scan", margin, -NUMERICAL_ZERO, margin >= -NUMERICAL_ZERO,
        detail=f"smallest margin at h = {h_worst:.6g}, y = {y_worst:.6g}",
    ))

    ys = np.linspace(0.0, b, numerics.grid_n)
    value = np.asarray(value_function_extended(sol, ev, switch, b, ys))
    gap = value - np.asarray(payoff_G_extended(ev, switch, b, ys))
    on_stop = ys <= h
    stop_gap = float(np.max(np.abs(gap[on_stop]))) if on_stop.any() else 0.0
    cont_gap = float(np.min(gap[~on_stop])) if (~on_stop).any() else 0.0
    checks.append(_result(
        "value_dominates_payoff", max(stop_gap, -cont_gap), NUMERICAL_ZERO,
        stop_gap <= NUMERICAL_ZERO and cont_gap >= -NUMERICAL_ZERO,
    ))
    payoff_at_h = payoff_G(ev, switch, b, h)
    checks.append(_result(
        "value_nonnegative", float(value.min()), 0.0, value.min() >= -NUMERICAL_ZERO and payoff_at_h > 0.0,
        detail=f"G_b(h*) = {payoff_at_h:.6g}",
    ))

    phi = ev.phi
    transform = max(scale_transform_error(ev, phi + step) for step in (0.5, 1.0, 2.0))
    checks.append(_result("scale_transform", transform, 1e-6, transform <= 1e-6))

    xs = np.linspace(0.0, 5.0, numerics.grid_n)
    ratio = np.asarray(ev.ratio_W(xs))
    bound = 1.0 / phi if phi > 0.0 else math.inf
    checks.append(_result(
        "ratio_monotone_bounded", float(ratio.max()), bound,
        bool(np.all(np.diff(ratio) >= -NUMERICAL_ZERO)) and ratio.max() <= bound + NUMERICAL_ZERO,
    ))

    bs = np.linspace(0.0, 2.0, numerics.grid_n)
    f_r = np.array([f_r_of_b(ev, level) for level in bs])
    checks.append(_result(
        "f_r_decreasing", abs(f_r[0]), NUMERICAL_ZERO,
        abs(f_r[0]) <= NUMERICAL_ZERO and bool(np.all(np.diff(f_r) < 0.0)),
    ))

    hs = np.linspace(0.0, b, numerics.grid_n)
    f_h = np.array([boundary_f(ev, switch, b, level) for level in hs])
    crossings = int(np.count_nonzero(np.diff(np.sign(f_h)) != 0))
    checks.append(_result(
        "boundary_single_crossing", crossings, 1.0,
        crossings == 1 and bool(np.all(np.diff(f_h) < 0.0)),
    ))

    return checks, generator_summary


def _threshold_below(h_star: float, y: float) -> float:
    # the two-sided identities need h <= y
    return h_star if h_star <= y else 0.5 * y


def _z_check(name: str, estimate, analytic: float) -> CheckResult:
    z = abs(estimate.z_score(analytic))
    return _result(
        name, z, Z_LIMIT, z < Z_LIMIT,
        detail=f"analytic {analytic:.8g}, estimate {estimate.mean:.8g} +- {estimate.std_error:.2g}",
    )


def monte_carlo_checks(
    config: RunConfig,
    ev: ScaleEvaluator,
    switch: SwitchTerms,
    sol: BoundarySolution,
    cfg: Optional[PathConfig] = None,
) -> Tuple[List[CheckResult], MartingaleReport]:
    """
    Compare the closed forms with Monte Carlo estimates at y = 0.5 b and y = 0.75 b, scan
    the W-martingale for constancy in time and, for sigma > 0, the effect of halving dt.
    """
    cfg = cfg if cfg is not None else config.numerics.mc
    model, terms = config.model, config.contract
    b, r = terms.b, terms.r
    checks = []

    def payoff(level):
        return payoff_G_extended(ev, switch, b, level)

    for y in (0.5 * b, 0.75 * b):
        h = _threshold_below(sol.h_star, y)
        estimates = simulate_drawdown_functionals(model, y, b, h, r, cfg, payoff)
        prob = DrawdownProblem(ev, b, y)
        analytic = {
            "exit_up": exit_up_transform(prob),
            "max_increase": discounted_max_increase(prob),
            "down_before_up": two_sided_down(prob, h),
            "up_before_down": two_sided_up(prob, h),
            "candidate_J": candidate_J(ev, switch, b, h, y),
        }
        for key, exact in analytic.items():
            checks.append(_z_check(f"mc_{key}@y={y:.4f}", estimates[key], exact))

        contract = switch_contract_value_mc(model, terms, switch, sol.h_star, y, cfg)
        checks.append(_z_check(f"mc_total_value@y={y:.4f}", contract, total_value(ev, terms, switch, y, sol)))

    y0 = 0.75 * b
    h = _threshold_below(sol.h_star, y0)
    martingale = martingale_scan(model, y0, b, h, r, MARTINGALE_TIMES, cfg, evaluator=ev)
    checks.append(_result(
        "martingale_constancy", len(martingale.flagged_pairs), 0.0, martingale.passed,
        detail=f"flagged {martingale.flagged_pairs}" if martingale.flagged_pairs else None,
    ))

    if not model.bounded_variation:
        shifts = dt_sensitivity(model, y0, b, h, r, cfg, payoff)
        worst = max(shifts.values())
        checks.append(_result("mc_dt_halving", worst, DT_SHIFT_LIMIT, worst < DT_SHIFT_LIMIT, detail=str(shifts)))

    return checks, martingale

"""
Free boundary of the switch option and the value function of the stopping problem

    V(y) = sup_theta E_y[exp(-r theta) G_b(Y_theta); theta <= tau_b^+].

The optimal rule stops the first time the drawdown falls below h*, the unique root of

    f(h) = alpha_tilde Z(b - h) - r alpha_tilde W(b - h)^2 / W'(b - h) - gamma.
"""
import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy import optimize

from errors import NoBracket, WindowViolation
from models.scale import ScaleEvaluator
from pricing.cds import cds_value, payoff_G, payoff_G_extended, payoff_G_prime, payoff_G_second
from pricing.drawdown import DrawdownProblem, check_interval, two_sided_down
from schemas.contract import CdsTerms, SwitchTerms
from schemas.report import BoundarySolution

logger = logging.getLogger(__name__)


def gamma_window(ev: ScaleEvaluator, alpha_tilde: float, b: float) -> Tuple[float, float]:
    """
    Window (lower, upper) of switching costs for which the boundary equation has a unique
    root in (0, b):

        alpha_tilde (1 - r W(0)^2 / W'(0)) < gamma < alpha_tilde (Z(b) - r W(b)^2 / W'(b)).

    :param ev: Scale functions at the discount rate r.
    :param alpha_tilde: Change in default payment, < 0.
    :param b: Default drawdown level.
    :return: (lower, upper).
    """
    r = ev.u
    lower = alpha_tilde * (1.0 - r * ev.W(0.0) * ev.ratio_W(0.0))
    upper = alpha_tilde * (ev.Z(b) - r * ev.W(b) * ev.ratio_W(b))
    return lower, upper


def f_r_of_b(ev: ScaleEvaluator, b: float) -> float:
    """
    f_r(b) = Z(b) - r (W(b)^2 / W'(b) - W(0)^2 / W'(0)) - 1; zero at b = 0 and decreasing.
    """
    r = ev.u
    return ev.Z(b) - r * (ev.W(b) * ev.ratio_W(b) - ev.W(0.0) * ev.ratio_W(0.0)) - 1.0


def f_r_prime(ev: ScaleEvaluator, b: float) -> float:
    """d/db f_r(b) = -r W(b) d/db (W / W')(b) < 0."""
    return -ev.u * ev.W(b) * ev.ratio_W_prime(b)


def boundary_f(ev: ScaleEvaluator, switch: SwitchTerms, b: float, h: float) -> float:
    """
    Left-hand side of the boundary equation, strictly decreasing in h on [0, b].
    """
    h = check_interval("h", h, 0.0, b)
    x = b - h
    a_t = switch.alpha_tilde
    return a_t * ev.Z(x) - ev.u * a_t * ev.W(x) * ev.ratio_W(x) - switch.gamma


def boundary_f_prime(ev: ScaleEvaluator, switch: SwitchTerms, b: float, h: float) -> float:
    """d/dh f(h) = r alpha_tilde W(b - h) d/dx (W / W')(b - h) < 0."""
    h = check_interval("h", h, 0.0, b)
    return ev.u * switch.alpha_tilde * ev.W(b - h) * ev.ratio_W_prime(b - h)


def solve_h_star(
    ev: ScaleEvaluator, switch: SwitchTerms, b: float, tol: float = 1e-12
) -> BoundarySolution:
    """
    Solve the boundary equation by bisection on [0, b].

    :param ev: Scale functions at the discount rate r.
    :param switch: Switch deltas and cost.
    :param b: Default drawdown level.
    :param tol: Absolute tolerance on h.
    :return: The boundary with window and pasting diagnostics.
    :raises WindowViolation: If gamma is not strictly inside the window.
    :raises NoBracket: If f does not change sign on [0, b].
    """
    lower, upper = gamma_window(ev, switch.alpha_tilde, b)
    if not lower < switch.gamma < upper:
        raise WindowViolation(
            f"gamma = {switch.gamma} must lie strictly inside ({lower:.10g}, {upper:.10g})"
        )

    f_0 = boundary_f(ev, switch, b, 0.0)
    f_b = boundary_f(ev, switch, b, b)
    if f_0 * f_b > 0.0:
        raise NoBracket(f"f(0) = {f_0:.6g} and f(b) = {f_b:.6g} have the same sign")

    h_star, result = optimize.bisect(
        lambda h: boundary_f(ev, switch, b, h), 0.0, b, xtol=tol, maxiter=200, full_output=True
    )
    logger.debug("bisection for h* converged=%s after %d iterations", result.converged, result.iterations)

    v_left = payoff_G(ev, switch, b, h_star)
    scale = v_left / ev.W(b - h_star)
    v_right = scale * ev.W(b - h_star)
    d_left = payoff_G_prime(ev, switch, b, h_star)
    d_right = -scale * ev.W_prime(b - h_star)

    return BoundarySolution(
        b=b,
        h_star=h_star,
        gamma_window=(lower, upper),
        f_at_0=f_0,
        f_at_b=f_b,
        f_at_h_star=boundary_f(ev, switch, b, h_star),
        continuous_gap=abs(v_left - v_right),
        pasting_gap=abs(d_left - d_right),
        iterations=result.iterations,
    )


def candidate_J(ev: ScaleEvaluator, switch: SwitchTerms, b: float, h: float, y: float) -> float:
    """
    Value of stopping at tau_h^-: J_h(y) = G_b(h) W(b - y) / W(b - h) for 0 < h <= y <= b.
    """
    return payoff_G(ev, switch, b, h) * two_sided_down(DrawdownProblem(ev, b, y), h)


def candidate_J_dh(ev: ScaleEvaluator, switch: SwitchTerms, b: float, h: float, y: float) -> float:
    """
    Partial derivative of J_h(y) in h,

        W(b-y) [-r alpha_tilde W(b-h)^2 + alpha_tilde Z(b-h) W'(b-h) - gamma W'(b-h)] / W(b-h)^2,

    which vanishes exactly when h solves the boundary equation.
    """
    check_interval("y", y, h, b)
    x = b - h
    w, w1 = ev.W(x), ev.W_prime(x)
    a_t = switch.alpha_tilde
    bracket = -ev.u * a_t * w**2 + a_t * ev.Z(x) * w1 - switch.gamma * w1
    return ev.W(b - y) * bracket / w**2


def second_order_condition(
    ev: ScaleEvaluator, switch: SwitchTerms, b: float, h: float, y: float
) -> float:
    """
    Second h-derivative of J_h(y) at a root h of the boundary equation,

        W(b-y) r alpha_tilde W'(b-h) d/dx (W / W')(b-h) / W(b-h),

    negative because alpha_tilde < 0.
    """
    check_interval("y", y, h, b)
    x = b - h
    return ev.W(b - y) * ev.u * switch.alpha_tilde * ev.W_prime(x) * ev.ratio_W_prime(x) / ev.W(x)


def _value_unchecked(sol: BoundarySolution, ev: ScaleEvaluator, switch: SwitchTerms, b: float, y):
    y = np.asarray(y, dtype=float)
    h = sol.h_star
    stop = payoff_G_extended(ev, switch, b, np.minimum(y, h))
    scale = payoff_G_extended(ev, switch, b, h) / ev.W(b - h)
    value = np.where(y <= h, stop, scale * ev.W(b - y))
    return value if value.ndim else float(value)


def value_function(
    sol: BoundarySolution, ev: ScaleEvaluator, switch: SwitchTerms, b: float, y: float
) -> float:
    """
    Value of the switch option: G_b(y) on [0, h*], G_b(h*) W(b - y) / W(b - h*) on [h*, b].
    """
    y = check_interval("y", y, 0.0, b)
    return _value_unchecked(sol, ev, switch, b, y)


def value_function_extended(sol: BoundarySolution, ev: ScaleEvaluator, switch: SwitchTerms, b: float, y):
    """Value function for any y >= 0; zero after default (y > b). Accepts scalars or arrays."""
    return _value_unchecked(sol, ev, switch, b, y)


def value_function_prime(
    sol: BoundarySolution,
    ev: ScaleEvaluator,
    switch: SwitchTerms,
    b: float,
    y: float,
    side: str = "left",
) -> float:
    """
    Derivative of the value function. At y = h* the side argument selects the one-sided
    derivative ("left" gives G_b'(h*), "right" the continuation-region derivative).
    """
    y = check_interval("y", y, 0.0, b)
    h = sol.h_star
    if y < h or (y == h and side == "left"):
        return payoff_G_prime(ev, switch, b, y)
    return -payoff_G(ev, switch, b, h) * ev.W_prime(b - y) / ev.W(b - h)


def value_function_second(
    sol: BoundarySolution, ev: ScaleEvaluator, switch: SwitchTerms, b: float, y: float
) -> float:
    """Second derivative away from h*; used by the diffusion term of the generator."""
    y = check_interval("y", y, 0.0, b)
    h = sol.h_star
    if y < h:
        return payoff_G_second(ev, switch, b, y)
    return payoff_G(ev, switch, b, h) * ev.W_second(b - y) / ev.W(b - h)


def total_value(
    ev: ScaleEvaluator,
    terms: CdsTerms,
    switch: SwitchTerms,
    y: float,
    solution: Optional[BoundarySolution] = None,
) -> float:
    """
    Value of the switchable contract: perpetual CDS value plus the switch option value.
    """
    sol = solution if solution is not None else solve_h_star(ev, switch, terms.b)
    return cds_value(ev, terms, y) + value_function(sol, ev, switch, terms.b, y)


def optimality_scan(
    sol: BoundarySolution,
    ev: ScaleEvaluator,
    switch: SwitchTerms,
    b: float,
    n_h: int = 50,
    n_y: int = 50,
) -> Tuple[float, Tuple[float, float]]:
    """
    Smallest margin V(y) - J_h(y) over h on an interior grid of (0, b) and y on a grid of [h, b].

    :return: (minimum margin, the (h, y) pair attaining it).
    """
    worst = (np.inf, (np.nan, np.nan))
    for h in np.linspace(0.0, b, n_h + 2)[1:-1]:
        ys = np.linspace(h, b, n_y)
        w_gap = ev.W(b - h)
        if w_gap == 0.0:
            continue
        j = payoff_G(ev, switch, b, h) * ev.W(b - ys) / w_gap
        margin = np.asarray(_value_unchecked(sol, ev, switch, b, ys)) - j
        idx = int(np.argmin(margin))
        if margin[idx] < worst[0]:
            worst = (float(margin[idx]), (float(h), float(ys[idx])))
    return worst


def suboptimal_levels(sol: BoundarySolution, epsilons: List[float]) -> List[float]:
    """Thresholds h* - eps and h* + eps that stay inside (0, b)."""
    levels = []
    for eps in epsilons:
        for level in (sol.h_star - eps, sol.h_star + eps):
            if 0.0 < level < sol.b:
                levels.append(level)
    return sorted(levels)

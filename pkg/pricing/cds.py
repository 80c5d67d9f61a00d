"""
Perpetual drawdown CDS and the payoff of the embedded switch option.

The buyer pays p per unit increase of the running maximum until default and receives
alpha at default, so the value to the buyer is

    C(y) = alpha * E_y[exp(-r tau_b^+)] - p * E_y[int_0^{tau_b^+} exp(-r t) dS_t]
         = alpha * Z(b - y) - (p + r alpha W(b)) / W'(b) * W(b - y).
"""
from errors import DomainError
from models.scale import ScaleEvaluator
from pricing.drawdown import DrawdownProblem, check_interval, discounted_max_increase, exit_up_transform
from schemas.contract import CdsTerms, SwitchTerms

PREMIUM_BASE_FLOOR = 1e-14


def _slope(ev: ScaleEvaluator, p: float, alpha: float, b: float) -> float:
    return (p + ev.u * alpha * ev.W(b)) / ev.W_prime(b)


def _cds_value(ev: ScaleEvaluator, p: float, alpha: float, b: float, y: float) -> float:
    # no domain check: for y > b the conventions W = 0, Z = 1 give the post-default value alpha
    return alpha * ev.Z(b - y) - _slope(ev, p, alpha, b) * ev.W(b - y)


def perpetual_cds_value(ev: ScaleEvaluator, p: float, alpha: float, b: float, y: float) -> float:
    """
    Value to the protection buyer of the perpetual drawdown CDS.

    :param ev: Scale functions at the discount rate r.
    :param p: Premium rate per unit increase of the running maximum.
    :param alpha: Default payment.
    :param b: Default drawdown level.
    :param y: Initial drawdown in [0, b].
    :return: The expected discounted net cash flow; linear in (p, alpha).
    """
    y = check_interval("y", y, 0.0, b)
    return _cds_value(ev, p, alpha, b, y)


def cds_value(ev: ScaleEvaluator, terms: CdsTerms, y: float) -> float:
    """Value of the outright contract described by terms."""
    if ev.u != terms.r:
        raise DomainError(f"evaluator rate {ev.u} does not match the contract rate {terms.r}")
    return perpetual_cds_value(ev, terms.p, terms.alpha, terms.b, y)


def par_spread_perpetual(ev: ScaleEvaluator, alpha: float, b: float, y: float) -> float:
    """
    Premium rate making the perpetual contract worth zero at y.

    :raises DomainError: If the expected discounted premium base vanishes (y = b with sigma > 0).
    """
    prob = DrawdownProblem(ev, b, y)
    base = discounted_max_increase(prob)
    if not base > PREMIUM_BASE_FLOOR:
        raise DomainError(f"no premium is ever paid from y = {y}; the par spread is undefined")
    return alpha * exit_up_transform(prob) / base


def payoff_G(ev: ScaleEvaluator, switch: SwitchTerms, b: float, y: float) -> float:
    """
    Switch payoff G_b(y) = C(y, b; p_tilde, alpha_tilde) - gamma.
    """
    y = check_interval("y", y, 0.0, b)
    return payoff_G_extended(ev, switch, b, y)


def payoff_G_extended(ev: ScaleEvaluator, switch: SwitchTerms, b: float, y):
    """
    G_b evaluated for any y >= 0, including the post-default region y > b where it equals
    alpha_tilde - gamma. Accepts scalars or arrays.
    """
    return _cds_value(ev, switch.p_tilde, switch.alpha_tilde, b, y) - switch.gamma


def payoff_G_prime(ev: ScaleEvaluator, switch: SwitchTerms, b: float, y: float) -> float:
    """
    G_b'(y) = -alpha_tilde r W(b - y) + (p_tilde + r alpha_tilde W(b)) / W'(b) * W'(b - y).

    One-sided at the endpoints: right derivative at 0, left derivative at b.
    """
    y = check_interval("y", y, 0.0, b)
    return (
        -switch.alpha_tilde * ev.u * ev.W(b - y)
        + _slope(ev, switch.p_tilde, switch.alpha_tilde, b) * ev.W_prime(b - y)
    )


def payoff_G_second(ev: ScaleEvaluator, switch: SwitchTerms, b: float, y: float) -> float:
    """G_b''(y) = alpha_tilde r W'(b - y) - (p_tilde + r alpha_tilde W(b)) / W'(b) * W''(b - y)."""
    y = check_interval("y", y, 0.0, b)
    return (
        switch.alpha_tilde * ev.u * ev.W_prime(b - y)
        - _slope(ev, switch.p_tilde, switch.alpha_tilde, b) * ev.W_second(b - y)
    )


def payoff_G_prime_via_b(
    ev: ScaleEvaluator, switch: SwitchTerms, b: float, y: float, step: float = 1e-6
) -> float:
    """
    G_b'(y) written as p_tilde W'(b-y)/W'(b) + r alpha_tilde W(b)^2/W'(b) * d/db (W(b-y)/W(b)),
    with the b-derivative taken by central differences. Only meaningful for 0 < y < b.
    """
    y = check_interval("y", y, 0.0, b)

    def ratio(level: float) -> float:
        return ev.W(level - y) / ev.W(level)

    d_ratio = (ratio(b + step) - ratio(b - step)) / (2.0 * step)
    w_b, w1_b = ev.W(b), ev.W_prime(b)
    return (
        switch.p_tilde * ev.W_prime(b - y) / w1_b
        + ev.u * switch.alpha_tilde * w_b**2 / w1_b * d_ratio
    )

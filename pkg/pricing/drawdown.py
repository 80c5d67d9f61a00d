"""
First-passage functionals of the drawdown process Y = S - X started at Y_0 = y.

tau_b^+ = inf{t : Y_t > b} is the default time and tau_h^- = inf{t : Y_t < h} the first
time the drawdown recovers below h. All identities are closed forms in W and Z at the
evaluator's rate q.
"""
from dataclasses import dataclass
from typing import Optional

from errors import DomainError
from models.scale import ScaleEvaluator
from schemas.model import JumpDiffusionModel

# slack for grid endpoints that land one ulp outside the closed interval
ENDPOINT_SLACK = 1e-12


def check_interval(name: str, value: float, lower: float, upper: float) -> float:
    """
    Validate lower <= value <= upper, snapping values within rounding slack onto the interval.

    :raises DomainError: If value lies outside the interval.
    """
    slack = ENDPOINT_SLACK * max(1.0, abs(lower), abs(upper))
    if not (lower - slack <= value <= upper + slack):
        raise DomainError(f"{name} = {value} must lie in [{lower}, {upper}]")
    return min(max(value, lower), upper)


@dataclass(frozen=True)
class DrawdownProblem:
    """
    A drawdown started at y with default level b, valued at the evaluator's rate.

    Attributes:
        eval: Scale functions at the discount rate q.
        b: Default drawdown level, b > 0.
        y: Initial drawdown, 0 <= y <= b.
    """
    eval: ScaleEvaluator
    b: float
    y: float

    def __post_init__(self):
        if not self.b > 0.0:
            raise DomainError(f"default level b must be > 0, got {self.b}")
        object.__setattr__(self, "y", check_interval("y", self.y, 0.0, self.b))

    @property
    def q(self) -> float:
        return self.eval.u

    def _check_threshold(self, h: float) -> float:
        if not 0.0 < h <= self.b + ENDPOINT_SLACK * max(1.0, self.b):
            raise DomainError(f"threshold h = {h} must lie in (0, {self.b}]")
        h = min(h, self.b)
        check_interval("y", self.y, h, self.b)
        return h


def _w_at_gap(ev: ScaleEvaluator, b: float, h: float) -> float:
    value = ev.W(b - h)
    if not value > 0.0:
        raise DomainError(f"W(b - h) vanishes at h = {h}; the two-sided identities need h < b when sigma > 0")
    return value


def exit_up_transform(prob: DrawdownProblem) -> float:
    """
    E_y[exp(-q tau_b^+)] = Z(b - y) - q * W(b) / W'(b) * W(b - y).
    """
    ev, b, y = prob.eval, prob.b, prob.y
    return ev.Z(b - y) - prob.q * ev.ratio_W(b) * ev.W(b - y)


def discounted_max_increase(prob: DrawdownProblem) -> float:
    """
    E_y[int_0^{tau_b^+} exp(-q t) dS_t] = W(b - y) / W'(b).
    """
    ev, b, y = prob.eval, prob.b, prob.y
    return ev.W(b - y) / ev.W_prime(b)


def two_sided_down(prob: DrawdownProblem, h: float) -> float:
    """
    E_y[exp(-q tau_h^-); tau_h^- <= tau_b^+] = W(b - y) / W(b - h), for 0 < h <= y <= b.
    """
    h = prob._check_threshold(h)
    ev, b, y = prob.eval, prob.b, prob.y
    return ev.W(b - y) / _w_at_gap(ev, b, h)


def two_sided_up(prob: DrawdownProblem, h: float) -> float:
    """
    E_y[exp(-q tau_b^+); tau_b^+ <= tau_h^-] = Z(b - y) - Z(b - h) / W(b - h) * W(b - y).
    """
    h = prob._check_threshold(h)
    ev, b, y = prob.eval, prob.b, prob.y
    return ev.Z(b - y) - ev.Z(b - h) / _w_at_gap(ev, b, h) * ev.W(b - y)


def classic_two_sided_exit(
    model: JumpDiffusionModel,
    u: float,
    x: float,
    b: float,
    evaluator: Optional[ScaleEvaluator] = None,
) -> float:
    """
    E_x[exp(-u T_b^+); T_b^+ < T_0^-] = W(x) / W(b) for the unreflected process X.

    :param model: The jump-diffusion model.
    :param u: Discount rate.
    :param x: Starting point in [0, b].
    :param b: Upper barrier, b > 0.
    :param evaluator: Optional prebuilt evaluator at rate u.
    :return: The Laplace transform of the upper exit time on the event of exiting upwards.
    """
    if not b > 0.0:
        raise DomainError(f"barrier b must be > 0, got {b}")
    x = check_interval("x", x, 0.0, b)
    ev = evaluator if evaluator is not None else ScaleEvaluator(model, u)
    if ev.u != u:
        raise DomainError(f"evaluator rate {ev.u} does not match u = {u}")
    return ev.W(x) / ev.W(b)

"""
Infinitesimal generator of the drawdown process inside (0, b),

    L_Y F(z) = -mu F'(z) + sigma^2 / 2 F''(z) + a int_0^inf [F(z + s) - F(z)] c exp(-c s) ds,

and the checks built on it: (L_Y - r) G_b = r gamma and the variational inequality
max{G_b - V, (L_Y - r) V} = 0.
"""
import logging
import math
import warnings
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from errors import DomainError, QuadratureError
from models.scale import ScaleEvaluator
from pricing.cds import payoff_G_extended, payoff_G_prime, payoff_G_second
from pricing.stopping import (
    value_function_extended,
    value_function_prime,
    value_function_second,
)
from schemas.contract import SwitchTerms
from schemas.model import JumpDiffusionModel
from schemas.numerics import GeneratorConfig
from schemas.report import BoundarySolution, VariationalReport

logger = logging.getLogger(__name__)

RealFunction = Callable[[float], float]


def jump_integral(
    model: JumpDiffusionModel,
    F: RealFunction,
    z: float,
    breakpoints: Sequence[float] = (),
    config: GeneratorConfig = GeneratorConfig(),
) -> float:
    """
    a * int_0^S [F(z + s) - F(z)] c exp(-c s) ds with S = -ln(tail_mass) / c.

    The range is split where z + s crosses a breakpoint of F (kinks and the jump of W at 0).
    """
    c = model.jump_decay
    s_max = -math.log(config.tail_mass) / c
    cuts = sorted({p - z for p in breakpoints if 0.0 < p - z < s_max})
    edges = [0.0, *cuts, s_max]
    f_z = F(z)

    def integrand(s: float) -> float:
        return (F(z + s) - f_z) * c * math.exp(-c * s)

    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for lo, hi in zip(edges[:-1], edges[1:]):
            try:
                piece, _ = integrate.quad(
                    integrand, lo, hi, epsabs=1e-12, epsrel=config.quad_rel_tol, limit=config.quad_limit
                )
            except integrate.IntegrationWarning as exc:
                raise QuadratureError(f"jump integral on [{lo:.6g}, {hi:.6g}] at z = {z:.6g}: {exc}") from exc
            total += piece
    return model.jump_rate * total


def apply_generator(
    model: JumpDiffusionModel,
    F: RealFunction,
    z: float,
    dF: Optional[RealFunction] = None,
    d2F: Optional[RealFunction] = None,
    breakpoints: Sequence[float] = (),
    config: GeneratorConfig = GeneratorConfig(),
) -> float:
    """
    Evaluate L_Y F(z).

    :param model: The jump-diffusion model.
    :param F: The function, defined on [0, inf) including beyond the default level.
    :param z: Interior point, away from kinks of F by at least 10 fd_step.
    :param dF: Analytic first derivative; central differences when omitted.
    :param d2F: Analytic second derivative; central differences when omitted.
    :param breakpoints: Points where F is not smooth.
    :param config: Quadrature and stencil settings.
    :return: L_Y F(z).
    """
    if z <= 0.0:
        raise DomainError(f"the generator is evaluated at interior points z > 0, got {z}")
    step = config.fd_step
    first = dF(z) if dF is not None else (F(z + step) - F(z - step)) / (2.0 * step)
    value = -model.mu * first
    if model.sigma > 0.0:
        second = d2F(z) if d2F is not None else (F(z + step) - 2.0 * F(z) + F(z - step)) / step**2
        value += 0.5 * model.sigma**2 * second
    return value + jump_integral(model, F, z, breakpoints, config)


def generator_values_G(
    model: JumpDiffusionModel,
    ev: ScaleEvaluator,
    switch: SwitchTerms,
    b: float,
    grid: Sequence[float],
    config: GeneratorConfig = GeneratorConfig(),
) -> np.ndarray:
    """(L_Y - r) G_b(z) on the grid, using analytic derivatives of G_b."""

    def G(y: float) -> float:
        return payoff_G_extended(ev, switch, b, y)

    values = [
        apply_generator(
            model,
            G,
            z,
            dF=lambda y: payoff_G_prime(ev, switch, b, y),
            d2F=lambda y: payoff_G_second(ev, switch, b, y),
            breakpoints=(b,),
            config=config,
        )
        - ev.u * G(z)
        for z in grid
    ]
    return np.asarray(values)


def generator_residual_G(
    model: JumpDiffusionModel,
    ev: ScaleEvaluator,
    switch: SwitchTerms,
    b: float,
    grid: Sequence[float],
    config: GeneratorConfig = GeneratorConfig(),
) -> np.ndarray:
    """Residuals (L_Y - r) G_b(z) - r gamma on an interior grid of (0, b)."""
    return generator_values_G(model, ev, switch, b, grid, config) - ev.u * switch.gamma


def generator_values_V(
    model: JumpDiffusionModel,
    ev: ScaleEvaluator,
    switch: SwitchTerms,
    b: float,
    sol: BoundarySolution,
    grid: Sequence[float],
    config: GeneratorConfig = GeneratorConfig(),
) -> np.ndarray:
    """(L_Y - r) V(z) on the grid; grid points must avoid h*."""

    def V(y: float) -> float:
        return value_function_extended(sol, ev, switch, b, y)

    values = [
        apply_generator(
            model,
            V,
            z,
            dF=lambda y: value_function_prime(sol, ev, switch, b, y),
            d2F=lambda y: value_function_second(sol, ev, switch, b, y),
            breakpoints=(sol.h_star, b),
            config=config,
        )
        - ev.u * V(z)
        for z in grid
    ]
    return np.asarray(values)


def interior_grid(b: float, n: int, avoid: Sequence[float] = (), gap: float = 0.0) -> np.ndarray:
    """n uniform interior points of (0, b), dropping those within gap of any point in avoid."""
    grid = np.linspace(0.0, b, n + 2)[1:-1]
    for point in avoid:
        grid = grid[np.abs(grid - point) > gap]
    return grid


def variational_check(
    model: JumpDiffusionModel,
    ev: ScaleEvaluator,
    switch: SwitchTerms,
    b: float,
    sol: BoundarySolution,
    grid: Sequence[float],
    tol: float = 1e-3,
    config: GeneratorConfig = GeneratorConfig(),
) -> VariationalReport:
    """
    Check max{G_b - V, (L_Y - r) V} = 0 pointwise.

    On the stopping region z < h* the report requires V = G_b and (L_Y - r) V <= tol; on the
    continuation region z > h* it requires |(L_Y - r) V| <= tol and G_b < V.

    :return: Report with the extreme values per region and the violating grid points.
    """
    grid = np.asarray(grid, dtype=float)
    h = sol.h_star
    generator = generator_values_V(model, ev, switch, b, sol, grid, config)
    payoff = np.asarray(payoff_G_extended(ev, switch, b, grid))
    value = np.asarray(value_function_extended(sol, ev, switch, b, grid))
    obstacle = payoff - value

    stopping = grid < h
    continuation = ~stopping
    bad_stop = stopping & ((generator > tol) | (np.abs(obstacle) > 1e-12))
    bad_cont = continuation & ((np.abs(generator) > tol) | (obstacle >= 0.0))
    violations = grid[bad_stop | bad_cont].tolist()
    if violations:
        logger.warning("variational inequality violated at %d grid points", len(violations))

    def _extreme(values: np.ndarray, mask: np.ndarray, reducer) -> float:
        return float(reducer(values[mask])) if mask.any() else 0.0

    return VariationalReport(
        h_star=h,
        stopping_max_generator=_extreme(generator, stopping, np.max),
        stopping_max_gap=_extreme(np.abs(obstacle), stopping, np.max),
        continuation_max_abs_generator=_extreme(np.abs(generator), continuation, np.max),
        continuation_max_obstacle=_extreme(obstacle, continuation, np.max),
        violations=violations,
    )

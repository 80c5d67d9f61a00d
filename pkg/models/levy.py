"""
Laplace exponent of the spectrally negative jump-diffusion

    psi(lambda) = mu * lambda + sigma^2 / 2 * lambda^2 - a * lambda / (lambda + c),

its derivative, the Esscher-transformed exponent and the real roots of psi(lambda) = u.
"""
import logging
from typing import Union

import numpy as np
from scipy import optimize

from errors import PoleError, RootSolveError
from schemas.model import JumpDiffusionModel, RootSet

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# imaginary parts below this are rounding noise of the companion-matrix eigenvalues
IMAG_TOL = 1e-7


def _check_pole(model: JumpDiffusionModel, lam: ArrayLike) -> None:
    if np.any(np.asarray(lam) == -model.jump_decay):
        raise PoleError(f"psi has a pole at lambda = -c = {-model.jump_decay}")


def laplace_exponent(model: JumpDiffusionModel, lam: ArrayLike) -> ArrayLike:
    """
    Evaluate psi(lambda).

    :param model: The jump-diffusion model.
    :param lam: Argument, scalar or array, never equal to -c.
    :return: psi(lambda) with the shape of lam.
    :raises PoleError: If lam equals -c.
    """
    _check_pole(model, lam)
    lam = np.asarray(lam, dtype=float)
    value = (
        model.mu * lam
        + 0.5 * model.sigma**2 * lam**2
        - model.jump_rate * lam / (lam + model.jump_decay)
    )
    return value if value.ndim else float(value)


def psi_derivative(model: JumpDiffusionModel, lam: ArrayLike) -> ArrayLike:
    """
    Evaluate psi'(lambda) = mu + sigma^2 lambda - a c / (lambda + c)^2.

    :param model: The jump-diffusion model.
    :param lam: Argument, scalar or array, never equal to -c.
    :return: psi'(lambda) with the shape of lam.
    :raises PoleError: If lam equals -c.
    """
    _check_pole(model, lam)
    lam = np.asarray(lam, dtype=float)
    value = (
        model.mu
        + model.sigma**2 * lam
        - model.jump_rate * model.jump_decay / (lam + model.jump_decay) ** 2
    )
    return value if value.ndim else float(value)


def esscher_exponent(model: JumpDiffusionModel, nu: float, lam: ArrayLike) -> ArrayLike:
    """
    Laplace exponent under the Esscher measure with parameter nu, psi(lambda + nu) - psi(nu).

    The 0-scale function of this exponent with nu = Phi(u) is W_{Phi(u)}.
    """
    shifted = np.asarray(lam, dtype=float) + nu
    return laplace_exponent(model, shifted) - laplace_exponent(model, nu)


def characteristic_polynomial(model: JumpDiffusionModel, u: float) -> np.ndarray:
    """
    Coefficients (highest degree first) of (mu l + sigma^2 l^2 / 2)(l + c) - a l - u (l + c).

    The polynomial is cubic when sigma > 0 and quadratic when sigma = 0; its real roots
    are exactly the solutions of psi(lambda) = u.
    """
    mu, c, a = model.mu, model.jump_decay, model.jump_rate
    half_var = 0.5 * model.sigma**2
    coeffs = np.array([
        half_var,
        mu + half_var * c,
        mu * c - a - u,
        -u * c,
    ])
    return coeffs[1:] if model.bounded_variation else coeffs


def _polish(model: JumpDiffusionModel, u: float, guess: float) -> float:
    poly = np.poly1d(characteristic_polynomial(model, u))
    dpoly = poly.deriv()
    try:
        return float(optimize.newton(poly, guess, fprime=dpoly, tol=1e-15, maxiter=50))
    except RuntimeError:
        logger.debug("newton polish did not converge from %.16g, keeping the eigenvalue root", guess)
        return guess


def solve_roots(model: JumpDiffusionModel, u: float, tol: float = 1e-12) -> RootSet:
    """
    Solve psi(lambda) = u for all real roots.

    The roots of the characteristic polynomial are taken from numpy's companion-matrix
    solver and polished with Newton steps on the polynomial. For u = 0 the root at 0 is
    set to 0 exactly.

    :param model: The jump-diffusion model.
    :param u: Killing rate, u >= 0.
    :param tol: Residual tolerance on |psi(root) - u|, relative to the magnitude of the terms of psi.
    :return: The sorted roots and Phi(u).
    :raises RootSolveError: If a root is complex or fails the residual check.
    """
    if u < 0:
        raise RootSolveError(f"killing rate u must be >= 0, got {u}")

    raw = np.roots(characteristic_polynomial(model, u))
    if np.any(np.abs(raw.imag) > IMAG_TOL * np.maximum(1.0, np.abs(raw.real))):
        raise RootSolveError(f"psi(lambda) = {u} has complex roots {raw}")

    roots = sorted(_polish(model, u, float(root)) for root in raw.real)
    if u == 0.0:
        # lambda = 0 always solves psi(lambda) = 0
        idx = int(np.argmin(np.abs(roots)))
        roots[idx] = 0.0
        roots.sort()

    for root in roots:
        residual = abs(laplace_exponent(model, root) - u)
        scale = max(1.0, abs(model.mu * root), 0.5 * model.sigma**2 * root**2,
                    abs(model.jump_rate * root / (root + model.jump_decay)))
        if residual > tol * scale:
            raise RootSolveError(
                f"root {root:.16g} of psi(lambda) = {u} has residual {residual:.3e} > {tol:.1e}"
            )

    logger.debug("roots of psi(lambda) = %s: %s", u, roots)
    return RootSet(roots=tuple(roots), phi=max(roots[-1], 0.0), u=u)

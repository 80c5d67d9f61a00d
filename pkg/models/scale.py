"""
Closed-form scale functions of the exponential jump-diffusion.

For x >= 0 the u-scale function is the partial-fraction sum

    W(x) = sum_i exp(root_i * x) / psi'(root_i)

over the real roots of psi(lambda) = u, and W(x) = 0 for x < 0. Z(x) = 1 + u * int_0^x W.
"""
import logging
from typing import Optional, Tuple, Union

import numpy as np

from errors import RepeatedRootError
from models.levy import psi_derivative, solve_roots
from schemas.model import JumpDiffusionModel, RootSet

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

ROOT_SEPARATION = 1e-8


def _out(value: np.ndarray) -> ArrayLike:
    return value if value.ndim else float(value)


class ScaleEvaluator:
    """
    Precomputed roots and partial-fraction coefficients of W^(u).

    Instances are immutable after construction; every evaluation is a pure function of
    its argument. Arguments may be scalars or numpy arrays. W, Z and W_esscher follow the
    conventions W(x) = 0 and Z(x) = 1 for x < 0; at x = 0 the right-hand values are used,
    so W(0) = 1/mu when sigma = 0. Derivatives are right derivatives at 0 and vanish for
    x < 0.
    """

    __slots__ = ("_model", "_u", "_root_set", "_roots", "_coeffs")

    def __init__(
        self,
        model: JumpDiffusionModel,
        u: float,
        roots: Optional[RootSet] = None,
        root_tol: float = 1e-12,
    ):
        root_set = roots if roots is not None else solve_roots(model, u, tol=root_tol)
        values = np.array(root_set.roots, dtype=float)
        gaps = np.diff(values)
        if gaps.size and gaps.min() < ROOT_SEPARATION:
            raise RepeatedRootError(
                f"roots {root_set.roots} of psi(lambda) = {u} are closer than {ROOT_SEPARATION}"
            )
        coeffs = 1.0 / np.asarray(psi_derivative(model, values), dtype=float)
        values.setflags(write=False)
        coeffs.setflags(write=False)

        self._model = model
        self._u = float(u)
        self._root_set = root_set
        self._roots = values
        self._coeffs = coeffs

    @property
    def model(self) -> JumpDiffusionModel:
        return self._model

    @property
    def u(self) -> float:
        return self._u

    @property
    def roots(self) -> RootSet:
        return self._root_set

    @property
    def phi(self) -> float:
        return self._root_set.phi

    @property
    def coeffs(self) -> Tuple[float, ...]:
        return tuple(self._coeffs.tolist())

    def _series(self, x: np.ndarray, weights: np.ndarray, shift: float = 0.0) -> np.ndarray:
        # sum_i weights_i * exp((root_i - shift) * x), zero for x < 0
        xs = np.clip(x, 0.0, None)[..., None]
        total = np.sum(weights * np.exp((self._roots - shift) * xs), axis=-1)
        return np.where(x < 0.0, 0.0, total)

    def _w_series(self, x: np.ndarray, shift: float = 0.0) -> np.ndarray:
        # the coefficients sum to 0 when sigma > 0, so W(0) = 0 exactly
        total = self._series(x, self._coeffs, shift)
        if self._model.bounded_variation:
            return total
        return np.where(x == 0.0, 0.0, total)

    def W(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        return _out(self._w_series(x))

    def W_prime(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        return _out(self._series(x, self._coeffs * self._roots))

    def W_second(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        return _out(self._series(x, self._coeffs * self._roots**2))

    def Z(self, x: ArrayLike) -> ArrayLike:
        """
        Z(x) = 1 + u * sum_i coeffs_i * (exp(root_i x) - 1) / root_i for x > 0, 1 otherwise.

        A root at 0 (only possible for u = 0) contributes its limit coeffs_i * x.
        """
        x = np.asarray(x, dtype=float)
        xs = np.clip(x, 0.0, None)[..., None]
        roots = self._roots
        nonzero = roots != 0.0
        safe = np.where(nonzero, roots, 1.0)
        integral = np.where(nonzero, np.expm1(roots * xs) / safe, xs)
        value = 1.0 + self._u * np.sum(self._coeffs * integral, axis=-1)
        return _out(np.where(x <= 0.0, 1.0, value))

    def W_esscher(self, x: ArrayLike) -> ArrayLike:
        """Scale function under the Esscher measure, W_{Phi(u)}(x) = exp(-Phi(u) x) W(x)."""
        x = np.asarray(x, dtype=float)
        return _out(self._w_series(x, shift=self.phi))

    def ratio_W(self, x: ArrayLike) -> ArrayLike:
        """W(x) / W'(x), increasing in x and bounded above by 1 / Phi(u)."""
        x = np.asarray(x, dtype=float)
        return _out(self._w_series(x) / self._series(x, self._coeffs * self._roots))

    def ratio_W_prime(self, x: ArrayLike) -> ArrayLike:
        """d/dx (W / W')(x) = 1 - W W'' / W'^2, strictly positive for x >= 0."""
        x = np.asarray(x, dtype=float)
        w = self._w_series(x)
        w1 = self._series(x, self._coeffs * self._roots)
        w2 = self._series(x, self._coeffs * self._roots**2)
        return _out(1.0 - w * w2 / w1**2)

    def __repr__(self) -> str:
        return f"ScaleEvaluator(u={self._u}, roots={self._root_set.roots})"

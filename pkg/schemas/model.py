from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class JumpDiffusionModel(BaseModel):
    """
    Spectrally negative jump-diffusion with exponential downward jumps.

    The Levy measure has density jump_rate * jump_decay * exp(jump_decay * x) on x < 0,
    so the total jump mass is finite and equal to jump_rate.

    Attributes:
        mu (float): Drift per unit time.
        sigma (float): Diffusion volatility, sigma >= 0.
        jump_rate (float): Poisson intensity a > 0 of the downward jumps.
        jump_decay (float): Exponential jump-size parameter c > 0 (mean jump size 1/c).
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    mu: float
    sigma: float = Field(ge=0.0)
    jump_rate: float = Field(gt=0.0)
    jump_decay: float = Field(gt=0.0)

    @model_validator(mode="after")
    def check_not_subordinator(self) -> "JumpDiffusionModel":
        # bounded-variation paths need a positive drift, otherwise X is a downward subordinator
        if self.sigma == 0.0 and self.mu <= 0.0:
            raise ValueError("mu must be > 0 when sigma = 0 (downward subordinators are excluded)")
        return self

    @property
    def bounded_variation(self) -> bool:
        return self.sigma == 0.0


class RootSet(BaseModel):
    """
    Real roots of psi(lambda) = u, sorted ascending.

    Attributes:
        roots (Tuple[float, ...]): Two roots when sigma = 0, three when sigma > 0.
        phi (float): The largest root, Phi(u).
        u (float): The killing rate the roots were solved for.
    """
    model_config = ConfigDict(frozen=True)

    roots: Tuple[float, ...]
    phi: float = Field(ge=0.0)
    u: float = Field(ge=0.0)

from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator


class PathConfig(BaseModel):
    """
    Monte Carlo path settings.

    Attributes:
        dt (float): Time step of the diffusion grid (unused between jumps when sigma = 0).
        horizon (Optional[float]): Cap on simulated time; None means ln(1e8) / r.
        n_paths (int): Number of simulated paths.
        seed (int): Root seed of the batch streams.
        antithetic (bool): Pair every path with its negated Brownian increments.
        batch_size (int): Paths per independently seeded batch.
        workers (int): Threads used to run batches; results do not depend on it.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    dt: float = Field(default=1e-4, gt=0.0)
    horizon: Optional[float] = Field(default=None, gt=0.0)
    n_paths: int = Field(default=200_000, ge=1)
    seed: int = Field(default=20240601, ge=0, lt=2**64)
    antithetic: bool = False
    batch_size: int = Field(default=50_000, ge=2)
    workers: int = Field(default=1, ge=1)


class GeneratorConfig(BaseModel):
    """
    Quadrature and stencil settings for the generator of the drawdown process.

    Attributes:
        quad_rel_tol (float): Relative tolerance of the jump-integral quadrature.
        tail_mass (float): Exponential mass beyond the truncation point of the jump integral.
        fd_step (float): Step of the finite-difference stencils.
        quad_limit (int): Maximum number of adaptive subintervals.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    quad_rel_tol: float = Field(default=1e-9, gt=0.0)
    tail_mass: float = Field(default=1e-14, gt=0.0, lt=1.0)
    fd_step: float = Field(default=1e-5, gt=0.0)
    quad_limit: int = Field(default=200, ge=10)


class NumericsConfig(BaseModel):
    """
    Tolerances and grids shared by the analytic checks.

    Attributes:
        grid_n (int): Number of uniform points on [0, b] used by property checks.
        root_tol (float): Residual tolerance of the polished roots of psi(lambda) = u.
        boundary_tol (float): Bisection tolerance on h.
        epsilons (Tuple[float, ...]): Offsets h* +- eps of the sub-optimal thresholds.
        generator_tol (float): Tolerance on generator residuals.
        continuous_pasting_tol (float): Tolerance of the value gap at h*.
        smooth_pasting_tol (float): Tolerance of the derivative gap at h*.
        mc (PathConfig): Monte Carlo settings.
        generator (GeneratorConfig): Quadrature settings.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    grid_n: int = Field(default=201, ge=3)
    root_tol: float = Field(default=1e-12, gt=0.0)
    boundary_tol: float = Field(default=1e-12, gt=0.0)
    epsilons: Tuple[float, ...] = (0.05, 0.1, 0.2)
    generator_tol: float = Field(default=1e-3, gt=0.0)
    continuous_pasting_tol: float = Field(default=1e-10, gt=0.0)
    smooth_pasting_tol: float = Field(default=1e-8, gt=0.0)
    mc: PathConfig = PathConfig()
    generator: GeneratorConfig = GeneratorConfig()

    @field_validator("epsilons")
    @classmethod
    def check_epsilons(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(eps <= 0.0 for eps in value):
            raise ValueError("every epsilon must be > 0")
        return value

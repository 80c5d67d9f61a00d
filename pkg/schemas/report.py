from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class BoundarySolution(BaseModel):
    """
    Solved free boundary of the switch option.

    Attributes:
        b (float): Default drawdown level the boundary was solved for.
        h_star (float): Optimal switch level in (0, b).
        gamma_window (Tuple[float, float]): (lower, upper) bounds the switching cost must lie strictly between.
        f_at_0 (float): Boundary function at h = 0, positive.
        f_at_b (float): Boundary function at h = b, negative.
        f_at_h_star (float): Residual of the boundary equation at h_star.
        continuous_gap (float): |V(h*-) - V(h*+)|.
        pasting_gap (float): |V'(h*-) - V'(h*+)|.
        iterations (int): Bisection iterations used.
    """
    model_config = ConfigDict(frozen=True)

    b: float
    h_star: float
    gamma_window: Tuple[float, float]
    f_at_0: float
    f_at_b: float
    f_at_h_star: float
    continuous_gap: float
    pasting_gap: float
    iterations: int


class McEstimate(BaseModel):
    """
    Monte Carlo point estimate.

    Attributes:
        mean (float): Sample mean.
        std_error (float): Standard error of the mean.
        n_effective (int): Number of independent samples (pairs when antithetic).
        censored_fraction (float): Share of paths still alive at the horizon.
    """
    model_config = ConfigDict(frozen=True)

    mean: float
    std_error: float = Field(ge=0.0)
    n_effective: int
    censored_fraction: float = Field(ge=0.0, le=1.0)

    def z_score(self, analytic: float) -> float:
        if self.std_error == 0.0:
            return 0.0 if analytic == self.mean else float("inf")
        return (self.mean - analytic) / self.std_error


class CheckResult(BaseModel):
    """
    Outcome of a single verification check.

    Attributes:
        name (str): Check identifier.
        passed (bool): Whether the check held at its tolerance.
        value (float): Measured statistic (max residual, gap, |z|, ...).
        tolerance (float): Threshold the statistic was compared against.
        detail (Optional[str]): Extra context, e.g. violating grid points.
    """
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: Optional[str] = None


class VariationalReport(BaseModel):
    """
    Pointwise check of max{G - V, (L_Y - r)V} = 0 on a grid.

    Attributes:
        h_star (float): Boundary used to split the grid.
        stopping_max_generator (float): max of (L_Y - r)V over the stopping region, must be <= tol.
        stopping_max_gap (float): max |G - V| over the stopping region.
        continuation_max_abs_generator (float): max |(L_Y - r)V| over the continuation region.
        continuation_max_obstacle (float): max of G - V over the continuation region, must be < 0.
        violations (List[float]): Grid points violating the inequality.
    """
    h_star: float
    stopping_max_generator: float
    stopping_max_gap: float
    continuation_max_abs_generator: float
    continuation_max_obstacle: float
    violations: List[float] = []

    @property
    def passed(self) -> bool:
        return not self.violations


class MartingaleRow(BaseModel):
    """
    Estimates of the stopped W- and Z-functionals at one time.

    Attributes:
        t (float): Observation time.
        w_functional (McEstimate): Estimate of E[e^{-u(t^tau)} W(b - Y_{t^tau})].
        z_functional (McEstimate): Estimate of E[e^{-u(t^tau)} Z(b - Y_{t^tau})].
    """
    t: float
    w_functional: McEstimate
    z_functional: McEstimate


class MartingaleReport(BaseModel):
    """
    Constancy-in-time scan of the two drawdown martingales.

    Attributes:
        rows (List[MartingaleRow]): One row per observation time.
        flagged_pairs (List[Tuple[float, float]]): Time pairs differing by more than 3 combined SE.
    """
    rows: List[MartingaleRow]
    flagged_pairs: List[Tuple[float, float]] = []

    @property
    def passed(self) -> bool:
        return not self.flagged_pairs


class PriceReport(BaseModel):
    """
    Output of the price command.

    Attributes:
        y (float): Initial drawdown.
        cds_value (float): Perpetual CDS value for the buyer.
        option_value (float): Value of the embedded switch option.
        total_value (float): Sum of the two.
        h_star (float): Optimal switch level.
        par_spread (Optional[float]): Premium rate making the outright contract worth zero.
    """
    y: float
    cds_value: float
    option_value: float
    total_value: float
    h_star: float
    par_spread: Optional[float] = None


class BoundaryReport(BaseModel):
    """
    Output of the boundary command.

    Attributes:
        solution (BoundarySolution): Solved boundary with diagnostics.
        payoff_at_h_star (float): G_b(h*).
    """
    solution: BoundarySolution
    payoff_at_h_star: float


class VerifyReport(BaseModel):
    """
    Output of the verify command.

    Attributes:
        passed (bool): True iff every check passed.
        checks (List[CheckResult]): Individual analytic and Monte Carlo checks.
        generator_values (Dict[str, float]): Summary statistics of (L_Y - r)G_b on the grid.
    """
    passed: bool
    checks: List[CheckResult]
    generator_values: Dict[str, float] = {}

from pydantic import BaseModel, ConfigDict, Field, model_validator

from schemas.contract import CdsTerms, SwitchTerms
from schemas.model import JumpDiffusionModel
from schemas.numerics import NumericsConfig


class SwitchBlock(BaseModel):
    """
    Replacement contract offered by the embedded switch option.

    Attributes:
        p_hat (float): New premium rate, p_hat < p.
        alpha_hat (float): New default payment, 0 <= alpha_hat < alpha.
        gamma (float): Switching cost, gamma <= 0.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    p_hat: float
    alpha_hat: float = Field(ge=0.0)
    gamma: float = Field(le=0.0)


class RunConfig(BaseModel):
    """
    Complete run configuration read by the CLI.

    Attributes:
        model (JumpDiffusionModel): Levy model block.
        contract (CdsTerms): Outright contract block.
        switch (SwitchBlock): Replacement contract block.
        numerics (NumericsConfig): Grids, tolerances and Monte Carlo settings.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    model: JumpDiffusionModel
    contract: CdsTerms
    switch: SwitchBlock
    numerics: NumericsConfig = NumericsConfig()

    @model_validator(mode="after")
    def check_switch_is_cheaper(self) -> "RunConfig":
        if self.switch.p_hat >= self.contract.p:
            raise ValueError("switch.p_hat must be < contract.p")
        if self.switch.alpha_hat >= self.contract.alpha:
            raise ValueError("switch.alpha_hat must be < contract.alpha")
        return self

    def switch_terms(self) -> SwitchTerms:
        return SwitchTerms.from_contract(
            self.contract, self.switch.p_hat, self.switch.alpha_hat, self.switch.gamma
        )

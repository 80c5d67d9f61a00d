from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class CdsTerms(BaseModel):
    """
    Economics of the outright perpetual drawdown CDS.

    Attributes:
        p (float): Premium rate paid per unit increase of the running maximum.
        alpha (float): Default payment, a currency amount (1 - R times notional).
        b (float): Drawdown level at which default is announced.
        r (float): Discount rate.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    p: float
    alpha: float = Field(ge=0.0)
    b: float = Field(gt=0.0)
    r: float = Field(gt=0.0)


class SwitchTerms(BaseModel):
    """
    Deltas of the replacement contract and the switching cost.

    Attributes:
        p_tilde (float): p_hat - p, strictly negative.
        alpha_tilde (float): alpha_hat - alpha, strictly negative.
        gamma (float): Switching cost, gamma <= 0.
        q_ratio (Optional[float]): alpha_hat / alpha, informational only.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    p_tilde: float = Field(lt=0.0)
    alpha_tilde: float = Field(lt=0.0)
    gamma: float = Field(le=0.0)
    q_ratio: Optional[float] = None

    @model_validator(mode="after")
    def check_ratio(self) -> "SwitchTerms":
        if self.q_ratio is not None and self.q_ratio >= 1.0:
            raise ValueError("q_ratio = alpha_hat / alpha must be < 1")
        return self

    @classmethod
    def from_contract(cls, terms: CdsTerms, p_hat: float, alpha_hat: float, gamma: float) -> "SwitchTerms":
        """
        Build the deltas from the outright contract and the replacement contract.

        :param terms: The outright contract.
        :param p_hat: Premium rate of the replacement contract.
        :param alpha_hat: Default payment of the replacement contract.
        :param gamma: Switching cost.
        :return: The validated switch terms.
        """
        q_ratio = alpha_hat / terms.alpha if terms.alpha > 0 else None
        return cls(
            p_tilde=p_hat - terms.p,
            alpha_tilde=alpha_hat - terms.alpha,
            gamma=gamma,
            q_ratio=q_ratio,
        )

import math

import numpy as np
import pytest

from errors import DomainError
from models.scale import ScaleEvaluator
from pricing.cds import (
    cds_value,
    par_spread_perpetual,
    payoff_G,
    payoff_G_extended,
    payoff_G_prime,
    payoff_G_prime_via_b,
    payoff_G_second,
    perpetual_cds_value,
)
from schemas.contract import CdsTerms, SwitchTerms
from schemas.model import JumpDiffusionModel

pytestmark = pytest.mark.cds

LEVEL = math.log(5.0)


def test_switch_terms_from_contract(terms, switch):
    """
    Test the deltas of the replacement contract.
    """
    assert switch.p_tilde == pytest.approx(-0.025), "p_tilde = p_hat - p"
    assert switch.alpha_tilde == pytest.approx(-5.0), "alpha_tilde = alpha_hat - alpha"
    assert switch.q_ratio == pytest.approx(0.5), "q = alpha_hat / alpha"


def test_payoff_reference_values_bounded_variation(model_bv, switch):
    """
    Test G_b at both ends of [0, b] for sigma = 0.
    """
    ev = ScaleEvaluator(model_bv, 0.1)
    assert payoff_G(ev, switch, LEVEL, 0.0) == pytest.approx(0.998, abs=2e-3), "G_b(0)"
    assert payoff_G(ev, switch, LEVEL, LEVEL) == pytest.approx(-1.78, abs=1e-2), "G_b(b)"


def test_payoff_at_default_level_with_diffusion(model_ubv, switch):
    """
    Test G_b(b) = alpha_tilde - gamma when sigma > 0.
    """
    ev = ScaleEvaluator(model_ubv, 0.1)
    assert payoff_G(ev, switch, LEVEL, LEVEL) == pytest.approx(-4.0, abs=1e-10), "G_b(b) for sigma = 0.2"


def test_payoff_is_shifted_cds_value(evaluator, switch):
    """
    Test G_b(y) = C(y; p_tilde, alpha_tilde) - gamma.
    """
    for y in np.linspace(0.0, LEVEL, 7):
        expected = perpetual_cds_value(evaluator, switch.p_tilde, switch.alpha_tilde, LEVEL, y) - switch.gamma
        assert payoff_G(evaluator, switch, LEVEL, y) == pytest.approx(expected, rel=1e-14, abs=1e-14), \
            f"payoff mismatch at y = {y}"


def test_cds_value_is_linear_in_terms(evaluator):
    """
    Test that the value of the replacement contract is the outright value plus the deltas.
    """
    y = 0.9
    outright = perpetual_cds_value(evaluator, 0.05, 10.0, LEVEL, y)
    delta = perpetual_cds_value(evaluator, -0.025, -5.0, LEVEL, y)
    replacement = perpetual_cds_value(evaluator, 0.025, 5.0, LEVEL, y)
    assert replacement == pytest.approx(outright + delta, rel=1e-12), "value must be linear in (p, alpha)"


def test_cds_value_checks_rate(evaluator):
    """
    Test that the evaluator rate must equal the contract rate.
    """
    terms = CdsTerms(p=0.05, alpha=10.0, b=LEVEL, r=0.2)
    with pytest.raises(DomainError):
        cds_value(evaluator, terms, 0.5)


def test_par_spread_zeroes_the_contract(evaluator, terms):
    """
    Test that the par spread makes the outright contract worth zero.
    """
    for y in (0.0, 0.5, 1.2):
        spread = par_spread_perpetual(evaluator, terms.alpha, terms.b, y)
        assert spread > 0.0, "par spread must be positive"
        value = perpetual_cds_value(evaluator, spread, terms.alpha, terms.b, y)
        assert value == pytest.approx(0.0, abs=1e-10), f"contract at par spread must be worth 0 at y = {y}"


@pytest.mark.parametrize("sigma", [0.05, 0.1, 0.2, 0.3, 0.5, 1.0])
def test_par_spread_undefined_at_immediate_default(sigma, terms):
    """
    Test that no par spread exists when default is immediate, for every diffusive volatility.
    """
    ev = ScaleEvaluator(JumpDiffusionModel(mu=0.075, sigma=sigma, jump_rate=0.5, jump_decay=9.0), 0.1)
    with pytest.raises(DomainError):
        par_spread_perpetual(ev, terms.alpha, terms.b, terms.b)


def test_payoff_derivatives_match_finite_differences(evaluator, switch):
    """
    Test G_b' and G_b'' against central differences at interior points.
    """
    step = 1e-5
    for y in np.linspace(0.1, LEVEL - 0.1, 9):
        d_g = (payoff_G(evaluator, switch, LEVEL, y + step) - payoff_G(evaluator, switch, LEVEL, y - step)) / (2 * step)
        d2_g = (
            payoff_G_prime(evaluator, switch, LEVEL, y + step) - payoff_G_prime(evaluator, switch, LEVEL, y - step)
        ) / (2 * step)
        assert payoff_G_prime(evaluator, switch, LEVEL, y) == pytest.approx(d_g, rel=1e-6, abs=1e-7), \
            f"G' mismatch at {y}"
        assert payoff_G_second(evaluator, switch, LEVEL, y) == pytest.approx(d2_g, rel=1e-6, abs=1e-6), \
            f"G'' mismatch at {y}"


def test_payoff_derivative_via_default_level(evaluator, switch):
    """
    Test the b-derivative representation of G_b' at interior points.
    """
    for y in (0.3, 0.8, 1.3):
        assert payoff_G_prime_via_b(evaluator, switch, LEVEL, y) == pytest.approx(
            payoff_G_prime(evaluator, switch, LEVEL, y), rel=1e-5, abs=1e-6
        ), f"representations of G' disagree at {y}"


def test_payoff_after_default(evaluator, switch):
    """
    Test that the extended payoff equals alpha_tilde - gamma beyond b.
    """
    values = payoff_G_extended(evaluator, switch, LEVEL, np.array([LEVEL + 0.01, LEVEL + 3.0]))
    assert np.allclose(values, switch.alpha_tilde - switch.gamma), "post-default payoff mismatch"
    with pytest.raises(DomainError):
        payoff_G(evaluator, switch, LEVEL, LEVEL + 0.01)


def test_switch_terms_validation():
    """
    Test that the replacement contract must be cheaper on both legs.
    """
    with pytest.raises(ValueError):
        SwitchTerms(p_tilde=0.01, alpha_tilde=-5.0, gamma=-1.0)
    with pytest.raises(ValueError):
        SwitchTerms(p_tilde=-0.01, alpha_tilde=-5.0, gamma=0.5)

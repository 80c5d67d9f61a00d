import json
import math
import pytest
from click.testing import CliRunner
import sys
import os

# Add the project root (one level up) to sys.path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from main import cli
from config import DEFAULT_CONFIG_PATH
from models.scale import ScaleEvaluator
from pricing.stopping import solve_h_star
from schemas.contract import CdsTerms, SwitchTerms
from schemas.model import JumpDiffusionModel

RATE = 0.1
DEFAULT_LEVEL = math.log(5.0)


def make_model(sigma: float) -> JumpDiffusionModel:
    """
    Build the reference jump-diffusion (mu = 0.075, a = 0.5, c = 9) with the given volatility.
    """
    return JumpDiffusionModel(mu=0.075, sigma=sigma, jump_rate=0.5, jump_decay=9.0)


@pytest.fixture
def model_bv():
    """
    Return the bounded-variation reference model (sigma = 0).
    """
    return make_model(0.0)


@pytest.fixture
def model_ubv():
    """
    Return the unbounded-variation reference model (sigma = 0.2).
    """
    return make_model(0.2)


@pytest.fixture(params=[0.0, 0.2], ids=["sigma0", "sigma0.2"])
def model(request):
    """
    Return each reference model in turn.
    """
    return make_model(request.param)


@pytest.fixture
def evaluator(model):
    """
    Scale functions of the parametrized model at the discount rate r = 0.1.
    """
    return ScaleEvaluator(model, RATE)


@pytest.fixture
def terms():
    """
    Return the outright contract: p = 0.05, alpha = 10, b = ln 5, r = 0.1.
    """
    return CdsTerms(p=0.05, alpha=10.0, b=DEFAULT_LEVEL, r=RATE)


@pytest.fixture
def switch(terms):
    """
    Return the switch deltas p_tilde = -0.025, alpha_tilde = -5 and cost gamma = -1.
    """
    return SwitchTerms.from_contract(terms, p_hat=0.025, alpha_hat=5.0, gamma=-1.0)


@pytest.fixture
def solution(evaluator, switch, terms):
    """
    Return the solved boundary for the parametrized model.
    """
    return solve_h_star(evaluator, switch, terms.b)


@pytest.fixture
def runner():
    """
    Create a click test runner.
    """
    return CliRunner()


@pytest.fixture
def invoke(runner):
    """
    Invoke the CLI with the given arguments and return the click Result.
    """
    def _invoke(*args):
        return runner.invoke(cli, list(args), catch_exceptions=False)
    return _invoke


@pytest.fixture
def default_document():
    """
    Return the shipped default configuration as a dictionary.
    """
    return json.loads(DEFAULT_CONFIG_PATH.read_text(encoding="utf-8"))


@pytest.fixture
def write_config(tmp_path, default_document):
    """
    Write a configuration file derived from the default and return its path.

    The callable takes a function that edits the document in place.
    """
    def _write(edit=None, name="config.json"):
        document = json.loads(json.dumps(default_document))
        if edit is not None:
            edit(document)
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path
    return _write
